#pragma once

#include <cstddef>

#include "gsi/epochs.hpp"
#include "gsi/graph_core.hpp"

namespace gsi {

// Binary radius graph: W_ij = 1 when 0 < |p_i - p_j| <= radius.
Graph spatial_graph(const Montage& montage, double radius);

enum class Taper { hann, rectangular };

struct SpectralEstimationConfig {
  std::size_t segment_length = 0;  // samples; 0 means one second at the data's rate
  double overlap = 0.5;            // fraction of a segment shared with the next, in [0, 1)
  double band_low = 2.0;           // Hz
  double band_high = 40.0;         // Hz
  Taper taper = Taper::hann;
};

// Weighted phase lag index per channel pair, from windowed-segment cross
// spectra pooled over segments, trials and the frequency bins in the band:
//   WPLI = |sum Im(S_xy)| / sum |Im(S_xy)|.
// Pairs whose denominator is below 1e-12 times sum |X||Y| get 0.
// Symmetric, zero diagonal, entries in [0, 1]; rows follow epochs.channel_names().
Matrix wpli_matrix(const EpochSet& epochs, const SpectralEstimationConfig& cfg = {});

// Elementwise product of the spatial weights with a WPLI matrix.
Graph wpli_weighted_spatial(const Graph& spatial, const Matrix& wpli);

}  // namespace gsi
