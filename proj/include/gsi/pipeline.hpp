#pragma once

#include <span>
#include <string>
#include <vector>

#include "gsi/epochs.hpp"
#include "gsi/graph_core.hpp"

namespace gsi {

// FFT-domain rate conversion of whole trials (downsampling only). Output has
// floor(samples * target / rate) samples; content above the new Nyquist is
// discarded, which is the anti-aliasing step.
EpochSet resample(const EpochSet& epochs, double target_rate);

// Second-order section in transposed direct form II; a0 is normalized to 1.
struct Biquad {
  double b0, b1, b2, a1, a2;
};

// 4th-order Butterworth high-pass at `low` cascaded with a 4th-order
// Butterworth low-pass at `high`, bilinear transform with prewarping.
std::vector<Biquad> butterworth_bandpass(double low, double high, double rate);

// Zero-phase forward-backward filtering with odd-extension padding and
// steady-state initial conditions, in place.
void filtfilt(std::span<const Biquad> sections, std::span<double> signal, std::size_t pad);

// Zero-phase band-pass of every channel of every trial.
EpochSet bandpass(const EpochSet& epochs, double low, double high);

// Samples [round(start*rate), round(start*rate) + round(duration*rate)).
EpochSet window(const EpochSet& epochs, double start_s, double duration_s);

// Whitens trials by R^{-1/2}, R the mean of X X^T / samples. Trials sharing a
// subject tag are aligned together; without tags the whole set is one group.
EpochSet euclidean_align(const EpochSet& epochs);

struct UnionMontage {
  Montage montage;
  // presence[d][i]: union electrode i is recorded in dataset d.
  std::vector<std::vector<bool>> presence;
};

// Union of the datasets' channel names, ordered as in `reference` (which
// supplies positions). Throws invalid_input naming electrodes missing from it.
UnionMontage make_union_montage(const Montage& reference, std::span<const std::vector<std::string>> dataset_channels);

// Reorders the recorded channels into union order, fills the absent union
// electrodes by graph interpolation at every time sample, then keeps
// `target_names` in the given order. Recorded channels pass through unchanged.
EpochSet map_to_union(const EpochSet& epochs, const UnionMontage& union_montage, const Graph& graph,
                      std::span<const std::string> target_names);

}  // namespace gsi
