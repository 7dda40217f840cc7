#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "lyapsip/kernels.h"

namespace lyapsip::kernels {

#ifndef LYAPSIP_BUILD_AVX2
// Stubs so that the avx2 namespace links on builds without the AVX2 unit.
// IsaAvailable(kAvx2) is false there, so these are never dispatched to.
namespace avx2 {
double Dot(std::span<const double> a, std::span<const double> b) {
  return scalar::Dot(a, b);
}
void Residuals(std::span<const double> a, std::span<const double> x,
               std::span<const double> b, std::span<double> out) {
  scalar::Residuals(a, x, b, out);
}
void Gemv(std::span<const double> a, std::span<const double> x,
          std::span<double> out) {
  scalar::Gemv(a, x, out);
}
void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  scalar::Axpy(alpha, x, y);
}
std::size_t ArgMax(std::span<const double> v) { return scalar::ArgMax(v); }
}  // namespace avx2
#endif

namespace {

bool CpuHasAvx2() {
#if defined(LYAPSIP_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa DetectIsa() {
  if (const char* env = std::getenv("LYAPSIP_ISA")) {
    if (std::string(env) == "scalar") return Isa::kScalar;
  }
  return CpuHasAvx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& ActiveSlot() {
  static std::atomic<Isa> slot{DetectIsa()};
  return slot;
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool IsaAvailable(Isa isa) {
  if (isa == Isa::kScalar) return true;
  static const bool avx2 = CpuHasAvx2();
  return avx2;
}

Isa ActiveIsa() { return ActiveSlot().load(std::memory_order_relaxed); }

void SetActiveIsa(Isa isa) {
  if (!IsaAvailable(isa)) {
    throw std::invalid_argument("ISA not available: " +
                                std::string(IsaName(isa)));
  }
  ActiveSlot().store(isa, std::memory_order_relaxed);
}

double Dot(std::span<const double> a, std::span<const double> b) {
  return ActiveIsa() == Isa::kAvx2 ? avx2::Dot(a, b) : scalar::Dot(a, b);
}

void Residuals(std::span<const double> a, std::span<const double> x,
               std::span<const double> b, std::span<double> out) {
  if (ActiveIsa() == Isa::kAvx2) {
    avx2::Residuals(a, x, b, out);
  } else {
    scalar::Residuals(a, x, b, out);
  }
}

void Gemv(std::span<const double> a, std::span<const double> x,
          std::span<double> out) {
  if (ActiveIsa() == Isa::kAvx2) {
    avx2::Gemv(a, x, out);
  } else {
    scalar::Gemv(a, x, out);
  }
}

void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (ActiveIsa() == Isa::kAvx2) {
    avx2::Axpy(alpha, x, y);
  } else {
    scalar::Axpy(alpha, x, y);
  }
}

std::size_t ArgMax(std::span<const double> v) {
  return ActiveIsa() == Isa::kAvx2 ? avx2::ArgMax(v) : scalar::ArgMax(v);
}

}  // namespace lyapsip::kernels
