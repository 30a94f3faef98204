#include <atomic>
#include <cstdlib>
#include <string>

#include "gsi/error.hpp"
#include "gsi/simd.hpp"

namespace gsi::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(GSI_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa resolve_default() {
  if (const char* env = std::getenv("GSI_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return Isa::scalar;
    if (choice == "avx2" && cpu_has_avx2()) return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{&table(resolve_default())};
  return current;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw invalid_input("simd kernel: length mismatch");
}

}  // namespace

bool available(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) throw invalid_input("simd: instruction set not available: " + std::string(name(isa)));
#if defined(GSI_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::avx2_table;
#endif
  return detail::scalar_table;
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { slot().store(&table(isa), std::memory_order_release); }

std::string_view name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

double dot(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size());
  return active().sum_sq_diff(a.data(), b.data(), a.size());
}

double sum_sq_dev(std::span<const double> a, double center) {
  return active().sum_sq_dev(a.data(), center, a.size());
}

double weighted_sq_diff(std::span<const double> w, std::span<const double> s, double center) {
  check_lengths(w.size(), s.size());
  return active().weighted_sq_diff(w.data(), s.data(), center, w.size());
}

}  // namespace gsi::simd
