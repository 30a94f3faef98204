#pragma once

// Thin RAII wrapper over FFTW real transforms. Plans use FFTW_ESTIMATE so the
// chosen algorithm, and therefore every output bit, is the same on each run.

#include <complex>
#include <cstddef>
#include <vector>

namespace gsi::detail {

class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  // Unnormalized forward transform of n real samples into n/2+1 bins.
  void forward(const double* in, std::complex<double>* out);
  // Unnormalized inverse of a half spectrum (n/2+1 bins) into n real samples.
  void inverse(const std::complex<double>* in, double* out);

 private:
  std::size_t n_;
  double* real_ = nullptr;
  void* spec_ = nullptr;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
};

}  // namespace gsi::detail
