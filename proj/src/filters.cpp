#include <algorithm>
#include <cmath>
#include <numbers>

#include "gsi/error.hpp"
#include "gsi/pipeline.hpp"

namespace gsi {
namespace {

// Pole-pair quality factors of a 4th-order Butterworth prototype.
constexpr double kQ[2] = {0.54119610014619701, 1.3065629648763766};

Biquad lowpass_section(double k, double q) {
  const double norm = 1.0 / (1.0 + k / q + k * k);
  const double b0 = k * k * norm;
  return {b0, 2.0 * b0, b0, 2.0 * (k * k - 1.0) * norm, (1.0 - k / q + k * k) * norm};
}

Biquad highpass_section(double k, double q) {
  const double norm = 1.0 / (1.0 + k / q + k * k);
  return {norm, -2.0 * norm, norm, 2.0 * (k * k - 1.0) * norm, (1.0 - k / q + k * k) * norm};
}

double dc_gain(const Biquad& s) { return (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2); }

void run(std::span<const Biquad> sections, std::vector<double>& x) {
  double level = x.front();
  for (const Biquad& s : sections) {
    // Steady state of the section for a constant input `level`.
    const double y_ss = dc_gain(s) * level;
    double z2 = s.b2 * level - s.a2 * y_ss;
    double z1 = s.b1 * level - s.a1 * y_ss + z2;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
    level = y_ss;
  }
}

}  // namespace

std::vector<Biquad> butterworth_bandpass(double low, double high, double rate) {
  if (!(low > 0.0 && low < high && high < rate / 2.0))
    throw invalid_input("bandpass: band must satisfy 0 < low < high < rate/2");
  const double k_low = std::tan(std::numbers::pi * low / rate);
  const double k_high = std::tan(std::numbers::pi * high / rate);
  return {highpass_section(k_low, kQ[0]), highpass_section(k_low, kQ[1]), lowpass_section(k_high, kQ[0]),
          lowpass_section(k_high, kQ[1])};
}

void filtfilt(std::span<const Biquad> sections, std::span<double> signal, std::size_t pad) {
  const std::size_t n = signal.size();
  if (n == 0) return;
  pad = std::min(pad, n - 1);
  std::vector<double> ext(n + 2 * pad);
  const double first = signal.front();
  const double last = signal.back();
  for (std::size_t i = 0; i < pad; ++i) ext[i] = 2.0 * first - signal[pad - i];
  std::copy(signal.begin(), signal.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * last - signal[n - 2 - i];

  run(sections, ext);
  std::reverse(ext.begin(), ext.end());
  run(sections, ext);
  std::reverse(ext.begin(), ext.end());
  std::copy_n(ext.begin() + static_cast<std::ptrdiff_t>(pad), n, signal.begin());
}

EpochSet bandpass(const EpochSet& epochs, double low, double high) {
  const auto sections = butterworth_bandpass(low, high, epochs.rate());
  // Pad by three periods of the low corner.
  const auto pad = static_cast<std::size_t>(std::ceil(3.0 * epochs.rate() / low));
  EpochSet out = epochs;
  for (std::size_t t = 0; t < out.n_trials(); ++t)
    for (std::size_t ch = 0; ch < out.n_channels(); ++ch) filtfilt(sections, out.row(t, ch), pad);
  return out;
}

}  // namespace gsi
