#include "gsi/graph_learning.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <limits>
#include <optional>

#include "gsi/error.hpp"
#include "gsi/simd.hpp"
#include "random.hpp"

namespace gsi {

void LearnConfig::validate() const {
  if (steps < 1) throw invalid_input("learn: steps must be at least 1");
  if (!(step_size > 0.0)) throw invalid_input("learn: step size must be positive");
  if (batch_size < 1) throw invalid_input("learn: batch size must be at least 1");
  if (!(mask_fraction > 0.0 && mask_fraction < 1.0)) throw invalid_input("learn: mask fraction must be in (0, 1)");
  if (!(ridge >= 0.0)) throw invalid_input("learn: ridge must be nonnegative");
  if (!(finetune_weight >= 0.0 && finetune_weight <= 1.0)) throw invalid_input("learn: fine-tune weight must be in [0, 1]");
  if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw invalid_input("learn: validation fraction must be in [0, 1)");
  if (!(init_mean_weight > 0.0) || !(init_noise >= 0.0)) throw invalid_input("learn: invalid warm-start parameters");
  if (max_halvings < 0) throw invalid_input("learn: max halvings must be nonnegative");
}

double softplus(double x) noexcept { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double inverse_softplus(double w) noexcept { return w + std::log(-std::expm1(-w)); }

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

AdjacencyParams::AdjacencyParams(std::size_t n_vertices)
    : n_(n_vertices), theta_(Vector::Zero(static_cast<Eigen::Index>(pair_count()))) {}

AdjacencyParams::AdjacencyParams(std::size_t n_vertices, Vector theta) : n_(n_vertices), theta_(std::move(theta)) {
  if (static_cast<std::size_t>(theta_.size()) != pair_count())
    throw invalid_input("adjacency params: expected " + std::to_string(pair_count()) + " parameters");
  if (!theta_.allFinite()) throw invalid_input("adjacency params: non-finite parameter");
}

std::size_t AdjacencyParams::pair_index(std::size_t i, std::size_t j) const {
  if (i == j || i >= n_ || j >= n_) throw invalid_input("adjacency params: invalid pair");
  if (i > j) std::swap(i, j);
  // Row-major strict upper triangle.
  return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

Matrix AdjacencyParams::weights() const {
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j, ++k) {
      const double v = softplus(theta_(static_cast<Eigen::Index>(k)));
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return w;
}

AdjacencyParams AdjacencyParams::from_weights(const Matrix& weights) {
  Graph::validate_weights(weights);
  const std::size_t n = weights.rows();
  AdjacencyParams p(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k)
      p.theta_(static_cast<Eigen::Index>(k)) = inverse_softplus(std::max(weights(i, j), 1e-12));
  return p;
}

AdjacencyParams AdjacencyParams::warm_start(const Graph& initial, double mean_weight, double noise,
                                            std::uint64_t seed) {
  const Matrix& w0 = initial.weights();
  const std::size_t n = initial.size();
  double edge_sum = 0.0;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (w0(i, j) > 0.0) {
        edge_sum += w0(i, j);
        ++edges;
      }
  const double scale = edges ? mean_weight * static_cast<double>(edges) / edge_sum : 0.0;
  const double floor = noise > 0.0 ? 0.1 * noise : 1e-12;

  detail::Rng rng(seed);
  std::uniform_real_distribution<double> jitter(-noise, noise);
  AdjacencyParams p(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      const double w = scale * w0(i, j) + (noise > 0.0 ? jitter(rng) : 0.0);
      p.theta_(static_cast<Eigen::Index>(k)) = inverse_softplus(std::max(w, floor));
    }
  }
  return p;
}

std::string LossTrace::to_csv() const {
  std::string out = "step,loss,val_r2\n";
  char line[96];
  for (std::size_t i = 0; i < loss.size(); ++i) {
    const double v = i < val_r2.size() ? val_r2[i] : std::numeric_limits<double>::quiet_NaN();
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", i, loss[i], v);
    out += line;
  }
  return out;
}

double r_squared(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size() || truth.empty()) throw invalid_input("r_squared: lengths must match and be nonzero");
  const double mean = simd::sum(truth) / static_cast<double>(truth.size());
  const double ss_tot = simd::sum_sq_dev(truth, mean);
  const double norm2 = simd::dot(truth, truth);
  if (ss_tot <= 1e-12 * norm2) throw numeric_error("r_squared: truth is constant, R^2 is undefined");
  return 1.0 - simd::sum_sq_diff(predicted, truth) / ss_tot;
}

double r_squared(const Matrix& predicted, const Matrix& truth) {
  if (predicted.rows() != truth.rows() || predicted.cols() != truth.cols())
    throw invalid_input("r_squared: shapes differ");
  return r_squared(std::span<const double>(predicted.data(), static_cast<std::size_t>(predicted.size())),
                   std::span<const double>(truth.data(), static_cast<std::size_t>(truth.size())));
}

namespace {

constexpr double kNegligibleWeight = 1e-10;

std::vector<Eigen::Index> as_index(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

WeightLoss masked_loss(const Matrix& weights, const Matrix& signals, const MaskSpec& mask, double ridge,
                       bool with_gradient) {
  const std::size_t n = mask.size();
  if (static_cast<std::size_t>(weights.rows()) != n || static_cast<std::size_t>(signals.rows()) != n)
    throw invalid_input("masked_loss: weights, signals and mask sizes differ");
  if (mask.missing().empty()) throw invalid_input("masked_loss: mask has no missing vertices");

  const auto mi = as_index(mask.missing());
  const auto oi = as_index(mask.observed());
  const Matrix observed = signals(oi, Eigen::all);
  const Matrix truth = signals(mi, Eigen::all);

  // Softplus weights never reach zero; pairs at the from_weights floor count as absent.
  if (const auto bad = unreachable_missing(weights, mask, kNegligibleWeight); !bad.empty()) {
    std::string list;
    for (std::size_t v : bad) list += (list.empty() ? "" : ",") + std::to_string(v);
    throw singular_error("masked_loss: masked vertices [" + list + "] have no edge path to an observed vertex", bad);
  }
  const InterpolationOperator op(laplacian_matrix(weights), mask, ridge);
  const Matrix recon = op.reconstruct_missing(observed);

  const std::span<const double> t(truth.data(), static_cast<std::size_t>(truth.size()));
  const double mean = simd::sum(t) / static_cast<double>(t.size());
  const double ss_tot = simd::sum_sq_dev(t, mean);
  if (ss_tot <= 1e-12 * simd::dot(t, t)) throw numeric_error("masked_loss: masked truth is constant, R^2 is undefined");
  const double ss_res = simd::sum_sq_diff({recon.data(), static_cast<std::size_t>(recon.size())}, t);

  WeightLoss out;
  out.loss = ss_res / ss_tot;
  if (!with_gradient) return out;

  // loss = |R - S_M|^2 / SS_tot with R = -A^{-1} B S_O, A = L_M + eps I, B = L_{M,O}.
  // With Gamma = A^{-1} dloss/dR: dloss/dA = -Gamma R^T, dloss/dB = -Gamma S_O^T.
  const Matrix dr = (2.0 / ss_tot) * (recon - truth);
  const Matrix gamma = op.solve(dr);
  Matrix g_a = -gamma * recon.transpose();
  const Matrix g_b = -gamma * observed.transpose();
  // eps = ridge * trace(L_M) / m couples every diagonal entry of L_M.
  const auto m = static_cast<Eigen::Index>(mi.size());
  g_a.diagonal().array() += ridge / static_cast<double>(m) * g_a.trace();

  // Local position of each vertex in the missing or observed block.
  std::vector<Eigen::Index> local(n);
  for (std::size_t k = 0; k < mi.size(); ++k) local[mi[k]] = static_cast<Eigen::Index>(k);
  for (std::size_t k = 0; k < oi.size(); ++k) local[oi[k]] = static_cast<Eigen::Index>(k);

  out.grad = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool mi_i = mask.is_missing(i), mi_j = mask.is_missing(j);
      double g = 0.0;
      if (mi_i && mi_j) {
        const Eigen::Index a = local[i], b = local[j];
        g = g_a(a, a) + g_a(b, b) - g_a(a, b) - g_a(b, a);
      } else if (mi_i) {
        g = g_a(local[i], local[i]) - g_b(local[i], local[j]);
      } else if (mi_j) {
        g = g_a(local[j], local[j]) - g_b(local[j], local[i]);
      }
      out.grad(i, j) = g;
      out.grad(j, i) = g;
    }
  }
  return out;
}

namespace {

void check_batch(const AdjacencyParams& params, const EpochSet& batch, const MaskSpec& mask) {
  if (batch.n_channels() != params.size() || mask.size() != params.size())
    throw invalid_input("reconstruction_loss: batch channels, mask and params sizes differ");
  if (batch.n_trials() == 0 || batch.n_samples() == 0) throw invalid_input("reconstruction_loss: empty batch");
}

Vector chain_to_theta(const AdjacencyParams& params, const Matrix& grad_w) {
  Vector g(static_cast<Eigen::Index>(params.pair_count()));
  std::size_t k = 0;
  for (std::size_t i = 0; i < params.size(); ++i)
    for (std::size_t j = i + 1; j < params.size(); ++j, ++k)
      g(static_cast<Eigen::Index>(k)) = grad_w(i, j) * sigmoid(params.theta()(static_cast<Eigen::Index>(k)));
  return g;
}

}  // namespace

double reconstruction_loss(const AdjacencyParams& params, const EpochSet& batch, const MaskSpec& mask, double ridge) {
  check_batch(params, batch, mask);
  return masked_loss(params.weights(), batch.pooled(), mask, ridge, false).loss;
}

Vector loss_gradient(const AdjacencyParams& params, const EpochSet& batch, const MaskSpec& mask, double ridge) {
  check_batch(params, batch, mask);
  return chain_to_theta(params, masked_loss(params.weights(), batch.pooled(), mask, ridge, true).grad);
}

EpochSet conform_channels(const EpochSet& data, const Montage& montage) {
  if (data.channel_names() == montage.names()) return data;
  if (data.n_channels() != montage.size())
    throw invalid_input("channels: data has " + std::to_string(data.n_channels()) + " channels, montage has " +
                        std::to_string(montage.size()));
  const auto names = montage.names();
  return data.select_channels(names);
}

namespace {

// Trials split once per run: a seeded shuffle, the tail held out for validation.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

Split split_trials(detail::Rng& rng, std::size_t n_trials, double val_fraction) {
  std::vector<std::size_t> order(n_trials);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n_trials; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  std::size_t n_val = 0;
  if (n_trials >= 2 && val_fraction > 0.0)
    n_val = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(val_fraction * static_cast<double>(n_trials))), 1,
                                    n_trials - 1);
  Split s;
  s.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
  s.val.assign(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
  return s;
}

std::size_t mask_count(double fraction, std::size_t n) {
  const auto k = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

// One random-mask subproblem (dataset B during fine-tuning, or the only one
// during plain learning): owns the RNG stream, the split and the validation block.
class MaskedProblem {
 public:
  MaskedProblem(const EpochSet& data, const LearnConfig& cfg, std::uint64_t seed)
      : data_(data), cfg_(cfg), rng_(seed), split_(split_trials(rng_, data.n_trials(), cfg.val_fraction)) {
    if (split_.train.empty()) throw invalid_input("learn: no training trials");
    if (!split_.val.empty()) val_ = data_.pooled(split_.val);
  }

  // Draws this step's mask and batch.
  void draw() {
    mask_.emplace(data_.n_channels(), detail::sample_indices(rng_, data_.n_channels(), mask_count(cfg_.mask_fraction, data_.n_channels())));
    const auto pick = detail::sample_indices(rng_, split_.train.size(), cfg_.batch_size);
    std::vector<std::size_t> trials;
    trials.reserve(pick.size());
    for (std::size_t p : pick) trials.push_back(split_.train[p]);
    batch_ = data_.pooled(trials);
  }

  WeightLoss evaluate(const Matrix& w, bool grad) const { return masked_loss(w, batch_, *mask_, cfg_.ridge, grad); }

  double validation_r2(const Matrix& w) const {
    if (val_.size() == 0) return std::numeric_limits<double>::quiet_NaN();
    try {
      return 1.0 - masked_loss(w, val_, *mask_, cfg_.ridge, false).loss;
    } catch (const numeric_error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }

 private:
  const EpochSet& data_;
  const LearnConfig& cfg_;
  detail::Rng rng_;
  Split split_;
  Matrix val_;
  Matrix batch_;
  std::optional<MaskSpec> mask_;
};

// Plain gradient descent with step halving. `objective(theta, grad)` returns
// the loss and fills the theta-gradient when `grad` is non-null.
template <class Objective, class Validate>
LossTrace descend(AdjacencyParams& params, const LearnConfig& cfg, Objective&& objective, Validate&& validate,
                  const std::function<void()>& draw) {
  LossTrace trace;
  trace.loss.reserve(cfg.steps);
  trace.val_r2.reserve(cfg.steps);
  Vector grad;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    draw();
    const double loss = objective(params, &grad);
    if (!std::isfinite(loss) || !grad.allFinite())
      throw numeric_error("learn: non-finite loss or gradient at step " + std::to_string(step));

    double eta = cfg.step_size;
    for (int h = 0; h <= cfg.max_halvings; ++h, eta *= 0.5) {
      Vector candidate = params.theta() - eta * grad;
      if (!candidate.allFinite()) continue;
      AdjacencyParams trial(params.size(), std::move(candidate));
      double next;
      try {
        next = objective(trial, nullptr);
      } catch (const numeric_error&) {
        continue;
      }
      if (std::isfinite(next) && next <= loss) {
        params = std::move(trial);
        break;
      }
    }
    trace.loss.push_back(loss);
    trace.val_r2.push_back(validate(params));
  }
  return trace;
}

}  // namespace

LearnResult continue_learning(const EpochSet& data, const Montage& montage, AdjacencyParams start,
                              const LearnConfig& cfg) {
  cfg.validate();
  if (montage.size() < 4) throw invalid_input("learn: montage needs at least 4 electrodes");
  if (start.size() != montage.size()) throw invalid_input("learn: parameter count does not match montage");
  if (data.n_trials() == 0 || data.n_samples() == 0) throw invalid_input("learn: empty data");
  const EpochSet conformed = conform_channels(data, montage);

  MaskedProblem problem(conformed, cfg, cfg.seed);
  auto objective = [&](const AdjacencyParams& p, Vector* grad) {
    WeightLoss r = problem.evaluate(p.weights(), grad != nullptr);
    if (grad) *grad = chain_to_theta(p, r.grad);
    return r.loss;
  };
  auto validate = [&](const AdjacencyParams& p) { return problem.validation_r2(p.weights()); };
  LossTrace trace = descend(start, cfg, objective, validate, [&] { problem.draw(); });
  Graph graph = start.graph(montage);
  return {std::move(graph), std::move(start), std::move(trace)};
}

LearnResult learn_graph(const EpochSet& data, const Graph& initial, const LearnConfig& cfg) {
  cfg.validate();
  AdjacencyParams start = AdjacencyParams::warm_start(initial, cfg.init_mean_weight, cfg.init_noise,
                                                      detail::derive_seed(cfg.seed, 1));
  return continue_learning(data, initial.montage(), std::move(start), cfg);
}

LearnResult finetune_graph(const Graph& graph, const EpochSet& data_a, const EpochSet& data_b, const LearnConfig& cfg) {
  cfg.validate();
  const Montage& montage_a = graph.montage();
  const std::size_t n = montage_a.size();

  std::string unmatched;
  std::vector<unsigned char> in_b(n, 0);
  for (const std::string& name : data_b.channel_names()) {
    if (const auto idx = montage_a.find(name)) {
      in_b[*idx] = 1;
    } else {
      unmatched += (unmatched.empty() ? "" : ",") + name;
    }
  }
  if (!unmatched.empty()) throw invalid_input("finetune: electrodes of B not in A: " + unmatched);

  std::vector<std::size_t> b_idx, a_only;
  std::vector<std::string> b_names;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_b[i]) {
      b_idx.push_back(i);
      b_names.push_back(montage_a[i].name);
    } else {
      a_only.push_back(i);
    }
  }
  if (b_idx.size() < 4) throw invalid_input("finetune: dataset B needs at least 4 electrodes");
  const EpochSet conformed_a = conform_channels(data_a, montage_a);
  const EpochSet conformed_b = data_b.select_channels(b_names);
  if (conformed_a.n_trials() == 0 || conformed_b.n_trials() == 0) throw invalid_input("finetune: empty data");

  const double alpha = cfg.finetune_weight;
  const auto bi = as_index(b_idx);
  MaskedProblem problem_b(conformed_b, cfg, cfg.seed);

  // Problem A: fixed mask A \ B, random batches from all of A's trials.
  detail::Rng rng_a(detail::derive_seed(cfg.seed, 2));
  std::optional<MaskSpec> mask_a;
  if (!a_only.empty()) mask_a.emplace(n, a_only);
  Matrix batch_a;

  auto draw = [&] {
    problem_b.draw();
    if (mask_a) {
      std::vector<std::size_t> pick = detail::sample_indices(rng_a, conformed_a.n_trials(), cfg.batch_size);
      batch_a = conformed_a.pooled(pick);
    }
  };

  auto objective = [&](const AdjacencyParams& p, Vector* grad) {
    const Matrix w = p.weights();
    Matrix grad_w;
    if (grad) grad_w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    double total = 0.0;
    if (alpha > 0.0) {
      WeightLoss rb = problem_b.evaluate(w(bi, bi), grad != nullptr);
      total += alpha * rb.loss;
      if (grad) grad_w(bi, bi) += alpha * rb.grad;
    }
    if (mask_a && alpha < 1.0) {
      WeightLoss ra = masked_loss(w, batch_a, *mask_a, cfg.ridge, grad != nullptr);
      total += (1.0 - alpha) * ra.loss;
      if (grad) grad_w += (1.0 - alpha) * ra.grad;
    }
    if (grad) *grad = chain_to_theta(p, grad_w);
    return total;
  };
  auto validate = [&](const AdjacencyParams& p) { return problem_b.validation_r2(p.weights()(bi, bi)); };

  AdjacencyParams params = AdjacencyParams::from_weights(graph.weights());
  LossTrace trace = descend(params, cfg, objective, validate, draw);
  Graph out = params.graph(montage_a);
  return {std::move(out), std::move(params), std::move(trace)};
}

}  // namespace gsi
