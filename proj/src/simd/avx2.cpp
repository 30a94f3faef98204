// Compiled with -mavx2 -mfma. Only reached through the dispatch table after a
// runtime CPU check.
#include "gsi/simd.hpp"

#include <immintrin.h>

#include <cmath>

namespace gsi::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i];
  return acc;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_sq_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double sum_sq_dev_avx2(const double* a, double center, std::size_t n) {
  const __m256d c = _mm256_set1_pd(center);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), c);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), c);
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), c);
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - center;
    acc += d * d;
  }
  return acc;
}

double weighted_sq_diff_avx2(const double* w, const double* s, double center, std::size_t n) {
  const __m256d c = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(c, _mm256_loadu_pd(s + i));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), d), d, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double d = center - s[i];
    total += w[i] * d * d;
  }
  return total;
}

void cross_imag_avx2(const double* xr, const double* xi, const double* yr, const double* yi,
                     std::size_t n, CrossImag* out) {
  // Separate mul/sub (no fma) so that x == y yields an exactly zero imaginary part.
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d s = _mm256_setzero_pd();
  __m256d sa = _mm256_setzero_pd();
  __m256d sm = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ar = _mm256_loadu_pd(xr + i);
    const __m256d ai = _mm256_loadu_pd(xi + i);
    const __m256d br = _mm256_loadu_pd(yr + i);
    const __m256d bi = _mm256_loadu_pd(yi + i);
    const __m256d im = _mm256_sub_pd(_mm256_mul_pd(ai, br), _mm256_mul_pd(ar, bi));
    s = _mm256_add_pd(s, im);
    sa = _mm256_add_pd(sa, _mm256_andnot_pd(sign_mask, im));
    const __m256d pa = _mm256_add_pd(_mm256_mul_pd(ar, ar), _mm256_mul_pd(ai, ai));
    const __m256d pb = _mm256_add_pd(_mm256_mul_pd(br, br), _mm256_mul_pd(bi, bi));
    sm = _mm256_add_pd(sm, _mm256_sqrt_pd(_mm256_mul_pd(pa, pb)));
  }
  double ts = hsum(s), tsa = hsum(sa), tsm = hsum(sm);
  for (; i < n; ++i) {
    const double im = xi[i] * yr[i] - xr[i] * yi[i];
    ts += im;
    tsa += std::fabs(im);
    tsm += std::sqrt((xr[i] * xr[i] + xi[i] * xi[i]) * (yr[i] * yr[i] + yi[i] * yi[i]));
  }
  out->sum_imag += ts;
  out->sum_abs_imag += tsa;
  out->sum_magnitude += tsm;
}

}  // namespace

namespace detail {
extern const KernelTable avx2_table{Isa::avx2,        sum_avx2,
                             dot_avx2,         sum_sq_diff_avx2,
                             sum_sq_dev_avx2,  weighted_sq_diff_avx2,
                             cross_imag_avx2};
}  // namespace detail

}  // namespace gsi::simd
