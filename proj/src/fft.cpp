#include "fft.hpp"

#include <algorithm>
#include <cstring>

#include <fftw3.h>

#include "gsi/error.hpp"

namespace gsi::detail {

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n == 0) throw invalid_input("fft: length must be positive");
  real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  spec_ = fftw_malloc(sizeof(fftw_complex) * bins());
  if (!real_ || !spec_) {
    fftw_free(real_);
    fftw_free(spec_);
    throw numeric_error("fft: allocation failed");
  }
  auto* spec = static_cast<fftw_complex*>(spec_);
  fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, spec, FFTW_ESTIMATE);
  inv_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec, real_, FFTW_ESTIMATE);
  if (!fwd_ || !inv_) {
    this->~RealFft();
    throw numeric_error("fft: planning failed");
  }
}

RealFft::~RealFft() {
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (inv_) fftw_destroy_plan(static_cast<fftw_plan>(inv_));
  fftw_free(real_);
  fftw_free(spec_);
  fwd_ = inv_ = nullptr;
  real_ = nullptr;
  spec_ = nullptr;
}

void RealFft::forward(const double* in, std::complex<double>* out) {
  std::copy_n(in, n_, real_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::memcpy(static_cast<void*>(out), spec_, sizeof(fftw_complex) * bins());
}

void RealFft::inverse(const std::complex<double>* in, double* out) {
  // c2r destroys its input, so it always works on the internal buffer.
  std::memcpy(spec_, static_cast<const void*>(in), sizeof(fftw_complex) * bins());
  fftw_execute(static_cast<fftw_plan>(inv_));
  std::copy_n(real_, n_, out);
}

}  // namespace gsi::detail
