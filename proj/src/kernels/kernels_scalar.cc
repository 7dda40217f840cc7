#include "lyapsip/kernels.h"

#include <cassert>

namespace lyapsip::kernels::scalar {

double Dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

void Residuals(std::span<const double> a, std::span<const double> x,
               std::span<const double> b, std::span<double> out) {
  const std::size_t cols = x.size();
  assert(out.size() == b.size());
  assert(a.size() == out.size() * cols);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = Dot(a.subspan(i * cols, cols), x) - b[i];
  }
}

void Gemv(std::span<const double> a, std::span<const double> x,
          std::span<double> out) {
  const std::size_t cols = x.size();
  assert(a.size() == out.size() * cols);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = Dot(a.subspan(i * cols, cols), x);
  }
}

void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

std::size_t ArgMax(std::span<const double> v) {
  assert(!v.empty());
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace lyapsip::kernels::scalar
