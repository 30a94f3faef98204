#include "gsi/simd.hpp"

#include <cmath>

namespace gsi::simd {
namespace {

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_sq_diff_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double sum_sq_dev_scalar(const double* a, double center, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - center;
    acc += d * d;
  }
  return acc;
}

double weighted_sq_diff_scalar(const double* w, const double* s, double center, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = center - s[i];
    acc += w[i] * d * d;
  }
  return acc;
}

void cross_imag_scalar(const double* xr, const double* xi, const double* yr, const double* yi,
                       std::size_t n, CrossImag* acc) {
  double s = 0.0, sa = 0.0, sm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Im(x * conj(y)) = xi*yr - xr*yi
    const double im = xi[i] * yr[i] - xr[i] * yi[i];
    s += im;
    sa += std::fabs(im);
    sm += std::sqrt((xr[i] * xr[i] + xi[i] * xi[i]) * (yr[i] * yr[i] + yi[i] * yi[i]));
  }
  acc->sum_imag += s;
  acc->sum_abs_imag += sa;
  acc->sum_magnitude += sm;
}

}  // namespace

namespace detail {
extern const KernelTable scalar_table{Isa::scalar,        sum_scalar,
                               dot_scalar,         sum_sq_diff_scalar,
                               sum_sq_dev_scalar,  weighted_sq_diff_scalar,
                               cross_imag_scalar};
}  // namespace detail

}  // namespace gsi::simd
