#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gsi/epochs.hpp"
#include "gsi/graph_core.hpp"
#include "gsi/interpolation.hpp"
#include "gsi/linalg.hpp"

namespace gsi {

struct LearnConfig {
  std::size_t steps = 1000;
  double step_size = 50.0;
  std::size_t batch_size = 16;     // trials per step
  double mask_fraction = 0.5;      // share of electrodes masked per step
  std::uint64_t seed = 0;
  double ridge = kDefaultRidge;    // relative ridge on the missing block
  double finetune_weight = 0.5;    // alpha: weight of the target-dataset loss when fine-tuning
  double val_fraction = 0.2;       // trials held out for the per-step validation R^2
  double init_mean_weight = 0.1;   // warm start: weight given to initial-graph edges
  double init_noise = 1e-3;        // warm start: uniform noise amplitude
  int max_halvings = 10;           // step-size backoff when a step increases the loss

  void validate() const;  // throws invalid_input
};

// Free parameters of a learned graph: one real per unordered vertex pair,
// realized as W_ij = W_ji = softplus(theta_ij), W_ii = 0.
class AdjacencyParams {
 public:
  explicit AdjacencyParams(std::size_t n_vertices);
  AdjacencyParams(std::size_t n_vertices, Vector theta);

  // Exact inverse of the realization; weights below 1e-12 are floored there.
  static AdjacencyParams from_weights(const Matrix& weights);
  // W = init_mean_weight * (edge weights scaled to mean 1) + U(-noise, noise),
  // floored at a tenth of the noise amplitude.
  static AdjacencyParams warm_start(const Graph& initial, double mean_weight, double noise, std::uint64_t seed);

  std::size_t size() const noexcept { return n_; }
  std::size_t pair_count() const noexcept { return n_ * (n_ - 1) / 2; }
  const Vector& theta() const noexcept { return theta_; }
  Vector& theta() noexcept { return theta_; }
  std::size_t pair_index(std::size_t i, std::size_t j) const;  // i != j

  Matrix weights() const;
  Graph graph(const Montage& montage) const { return Graph(montage, weights()); }

 private:
  std::size_t n_ = 0;
  Vector theta_;
};

double softplus(double x) noexcept;
double inverse_softplus(double w) noexcept;
double sigmoid(double x) noexcept;

struct LossTrace {
  std::vector<double> loss;    // 1 - R^2 on the step's batch, before the update
  std::vector<double> val_r2;  // R^2 on the validation trials after the update (NaN when none)

  std::size_t size() const noexcept { return loss.size(); }
  std::string to_csv() const;  // header "step,loss,val_r2"
};

// 1 - SS_res / SS_tot, SS_tot centered on the mean of truth. Throws
// numeric_error when truth is constant (SS_tot <= 1e-12 * |truth|^2).
double r_squared(std::span<const double> predicted, std::span<const double> truth);
double r_squared(const Matrix& predicted, const Matrix& truth);

// Masked-reconstruction loss on an n x T block of graph signals (one column
// per time sample) for the graph with the given weights, and optionally its
// gradient with respect to each unordered pair weight (grad(i,j) == grad(j,i)).
struct WeightLoss {
  double loss = 0.0;
  Matrix grad;  // empty unless requested
};
WeightLoss masked_loss(const Matrix& weights, const Matrix& signals, const MaskSpec& mask, double ridge,
                       bool with_gradient);

// Loss pooled over every time sample of every trial of the batch; channels
// of the batch are the params' vertices in order.
double reconstruction_loss(const AdjacencyParams& params, const EpochSet& batch, const MaskSpec& mask,
                           double ridge = kDefaultRidge);
// d loss / d theta, one entry per pair in pair_index order.
Vector loss_gradient(const AdjacencyParams& params, const EpochSet& batch, const MaskSpec& mask,
                     double ridge = kDefaultRidge);

struct LearnResult {
  Graph graph;
  AdjacencyParams params;
  LossTrace trace;
};

// Warm-starts from `initial` (typically the spatial graph) and runs
// cfg.steps descent steps, each on a fresh random mask and trial batch.
// `data` channels must name the initial graph's electrodes (any order).
LearnResult learn_graph(const EpochSet& data, const Graph& initial, const LearnConfig& cfg);

// Same loop from explicit starting parameters, without the warm start.
LearnResult continue_learning(const EpochSet& data, const Montage& montage, AdjacencyParams start,
                              const LearnConfig& cfg);

// Adapts a graph learned on A to dataset B, whose electrodes are a subset of
// A's. Each step descends on alpha * loss_B + (1 - alpha) * loss_A, where
// loss_B masks a random share of B's electrodes and reconstructs on the
// subgraph over B, and loss_A masks exactly the electrodes of A absent from B.
// The trace reports the combined loss and the validation R^2 on B.
LearnResult finetune_graph(const Graph& graph, const EpochSet& data_a, const EpochSet& data_b, const LearnConfig& cfg);

// Channels of `data` reordered to match `montage`; throws invalid_input when
// the name sets differ.
EpochSet conform_channels(const EpochSet& data, const Montage& montage);

}  // namespace gsi
