// Compiled with -mavx2 only (no FMA) so that accumulate_sq_diff rounds exactly
// like the scalar loop and results are bit-identical.
#include "vw/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace vw::kernels::avx2 {

namespace {
inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_max_pd(lo, hi);
  m = _mm_max_pd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}
inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_min_pd(lo, hi);
  m = _mm_min_pd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}
}  // namespace

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  double r = hmax(m);
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > r) r = d;
  }
  return r;
}

void accumulate_sq_diff(const double* a, const double* b, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(d, d));
    _mm256_storeu_pd(acc + i, s);
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc[i] += d * d;
  }
}

double max_value(const double* a, std::size_t n) {
  __m256d m = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(a + i));
  double r = hmax(m);
  for (; i < n; ++i)
    if (a[i] > r) r = a[i];
  return r;
}

void minmax(const double* a, std::size_t n, double* lo, double* hi) {
  __m256d l = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d h = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(a + i);
    l = _mm256_min_pd(l, v);
    h = _mm256_max_pd(h, v);
  }
  double rl = hmin(l), rh = hmax(h);
  for (; i < n; ++i) {
    if (a[i] < rl) rl = a[i];
    if (a[i] > rh) rh = a[i];
  }
  *lo = rl;
  *hi = rh;
}

}  // namespace vw::kernels::avx2
