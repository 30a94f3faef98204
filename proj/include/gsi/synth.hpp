#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

#include "gsi/epochs.hpp"
#include "gsi/graph_core.hpp"

namespace gsi {

struct SynthConfig {
  Graph graph;
  std::size_t n_trials = 1;
  std::size_t n_samples = 1;
  double tau = 1.0;                                       // smoothness, >= 0
  double snr_db = std::numeric_limits<double>::infinity();  // infinite means noiseless
  std::uint64_t seed = 0;
  double rate = 160.0;  // nominal, recorded in the EpochSet
};

// Each time sample is U exp(-tau Lambda) e, e ~ N(0, I), plus white noise
// whose variance is the expected per-channel signal power / 10^(snr/10).
// Channels follow the graph's montage order.
EpochSet synth_generate(const SynthConfig& cfg);

// n electrodes spread over the upper half of the unit sphere on a golden-angle
// spiral, named E00, E01, ... Deterministic.
Montage hemisphere_montage(std::size_t n);

// Ground-truth graph: each electrode joined to its k nearest neighbours with
// seeded weights drawn uniformly from [low, high].
Graph random_neighbor_graph(const Montage& montage, std::uint64_t seed, std::size_t k = 8, double low = 0.2,
                            double high = 1.0);

// Smallest radius for which the binary radius graph is connected (the longest
// edge of the Euclidean minimum spanning tree).
double connecting_radius(const Montage& montage);

}  // namespace gsi
