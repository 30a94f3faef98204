#pragma once

// Data-parallel reduction kernels. Every kernel has a scalar reference
// implementation; AVX2 variants are compiled separately and picked at
// runtime when the CPU supports them. GSI_SIMD=scalar|avx2 in the
// environment overrides the choice at first use.

#include <cstddef>
#include <span>
#include <string_view>

namespace gsi::simd {

enum class Isa { scalar, avx2 };

struct CrossImag {
  double sum_imag = 0.0;      // sum of Im(x * conj(y))
  double sum_abs_imag = 0.0;  // sum of |Im(x * conj(y))|
  double sum_magnitude = 0.0; // sum of |x| * |y|
};

struct KernelTable {
  Isa isa;
  double (*sum)(const double* a, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  double (*sum_sq_dev)(const double* a, double center, std::size_t n);
  double (*weighted_sq_diff)(const double* w, const double* s, double center, std::size_t n);
  void (*cross_imag)(const double* xr, const double* xi, const double* yr, const double* yi,
                     std::size_t n, CrossImag* acc);
};

bool available(Isa isa) noexcept;
const KernelTable& table(Isa isa);

// The table used by the library. Resolved once, on first call.
const KernelTable& active();
void set_active(Isa isa);
std::string_view name(Isa isa) noexcept;

namespace detail {
extern const KernelTable scalar_table;
#if defined(GSI_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

// Span front-ends over the active table.
double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
// sum (a_i - b_i)^2
double sum_sq_diff(std::span<const double> a, std::span<const double> b);
// sum (a_i - center)^2
double sum_sq_dev(std::span<const double> a, double center);
// sum w_i (center - s_i)^2
double weighted_sq_diff(std::span<const double> w, std::span<const double> s, double center);

}  // namespace gsi::simd
