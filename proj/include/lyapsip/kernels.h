#pragma once

// Dense arithmetic kernels used by the QP solver and the verifier grid.
//
// Every kernel has a portable scalar reference implementation and, on x86-64
// builds, an AVX2/FMA variant. The variant is chosen once at startup from the
// CPU feature bits; setting LYAPSIP_ISA=scalar in the environment forces the
// reference path. Matrices are dense and row-major.

#include <cstddef>
#include <span>
#include <string_view>

namespace lyapsip::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view IsaName(Isa isa);

/// True when `isa` was compiled in and the running CPU supports it.
bool IsaAvailable(Isa isa);

/// The ISA currently used by the dispatching entry points below.
Isa ActiveIsa();

/// Switches the dispatch target. Throws std::invalid_argument if `isa` is not
/// available. Intended for tests and benchmarks.
void SetActiveIsa(Isa isa);

// Dispatching entry points.

double Dot(std::span<const double> a, std::span<const double> b);

/// out[i] = A[i,:] . x - b[i] for a rows x x.size() row-major A.
void Residuals(std::span<const double> a, std::span<const double> x,
               std::span<const double> b, std::span<double> out);

/// out[i] = A[i,:] . x.
void Gemv(std::span<const double> a, std::span<const double> x,
          std::span<double> out);

/// y += alpha * x.
void Axpy(double alpha, std::span<const double> x, std::span<double> y);

/// Index of the largest element (lowest index on ties); size must be > 0.
std::size_t ArgMax(std::span<const double> v);

// Per-ISA implementations, exposed so that equivalence tests can call both
// sides directly regardless of the active dispatch target.

namespace scalar {
double Dot(std::span<const double> a, std::span<const double> b);
void Residuals(std::span<const double> a, std::span<const double> x,
               std::span<const double> b, std::span<double> out);
void Gemv(std::span<const double> a, std::span<const double> x,
          std::span<double> out);
void Axpy(double alpha, std::span<const double> x, std::span<double> y);
std::size_t ArgMax(std::span<const double> v);
}  // namespace scalar

namespace avx2 {
double Dot(std::span<const double> a, std::span<const double> b);
void Residuals(std::span<const double> a, std::span<const double> x,
               std::span<const double> b, std::span<double> out);
void Gemv(std::span<const double> a, std::span<const double> x,
          std::span<double> out);
void Axpy(double alpha, std::span<const double> x, std::span<double> y);
std::size_t ArgMax(std::span<const double> v);
}  // namespace avx2

}  // namespace lyapsip::kernels
