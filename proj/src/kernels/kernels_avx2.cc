#include <immintrin.h>

#include <cassert>

#include "lyapsip/kernels.h"

namespace lyapsip::kernels::avx2 {

namespace {

inline double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

inline double DotRaw(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    i += 4;
  }
  double sum = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

double Dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return DotRaw(a.data(), b.data(), a.size());
}

void Residuals(std::span<const double> a, std::span<const double> x,
               std::span<const double> b, std::span<double> out) {
  const std::size_t cols = x.size();
  assert(out.size() == b.size());
  assert(a.size() == out.size() * cols);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = DotRaw(a.data() + i * cols, x.data(), cols) - b[i];
  }
}

void Gemv(std::span<const double> a, std::span<const double> x,
          std::span<double> out) {
  const std::size_t cols = x.size();
  assert(a.size() == out.size() * cols);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = DotRaw(a.data() + i * cols, x.data(), cols);
  }
}

void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const __m256d scale = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i,
                     _mm256_fmadd_pd(scale, _mm256_loadu_pd(x.data() + i), yv));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

std::size_t ArgMax(std::span<const double> v) {
  assert(!v.empty());
  const std::size_t n = v.size();
  std::size_t i = 0;
  double best = v[0];
  if (n >= 4) {
    __m256d vmax = _mm256_loadu_pd(v.data());
    for (i = 4; i + 4 <= n; i += 4) {
      vmax = _mm256_max_pd(vmax, _mm256_loadu_pd(v.data() + i));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vmax);
    best = lanes[0];
    for (int k = 1; k < 4; ++k) best = lanes[k] > best ? lanes[k] : best;
  }
  for (; i < n; ++i) best = v[i] > best ? v[i] : best;
  // First occurrence keeps the lowest-index tie rule of the scalar path.
  for (std::size_t k = 0; k < n; ++k) {
    if (v[k] == best) return k;
  }
  return 0;
}

}  // namespace lyapsip::kernels::avx2
