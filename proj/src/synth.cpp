#include "gsi/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "gsi/error.hpp"
#include "random.hpp"

namespace gsi {

EpochSet synth_generate(const SynthConfig& cfg) {
  if (cfg.n_trials < 1 || cfg.n_samples < 1) throw invalid_input("synth: trials and samples must be at least 1");
  if (!(cfg.tau >= 0.0) || std::isinf(cfg.tau)) throw invalid_input("synth: tau must be finite and nonnegative");
  if (std::isnan(cfg.snr_db)) throw invalid_input("synth: snr must be a number or infinity");

  const Spectrum spec = spectrum(build_laplacian(cfg.graph));
  const Eigen::Index n = static_cast<Eigen::Index>(cfg.graph.size());
  const Vector response = (-cfg.tau * spec.eigenvalues.array().cwiseMax(0.0)).exp().matrix();
  const Matrix mixing = spec.eigenvectors * response.asDiagonal();
  const double signal_power = response.squaredNorm() / static_cast<double>(n);
  const bool noisy = std::isfinite(cfg.snr_db);
  const double noise_sd = noisy ? std::sqrt(signal_power / std::pow(10.0, cfg.snr_db / 10.0)) : 0.0;

  EpochSet out(cfg.n_trials, cfg.graph.montage().names(), cfg.n_samples, cfg.rate);
  detail::Rng rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix e(n, static_cast<Eigen::Index>(cfg.n_samples));
  for (std::size_t t = 0; t < cfg.n_trials; ++t) {
    for (Eigen::Index k = 0; k < e.size(); ++k) e.data()[k] = gauss(rng);
    Matrix x = mixing * e;
    if (noisy)
      for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] += noise_sd * gauss(rng);
    out.trial(t) = x;
  }
  return out;
}

Montage hemisphere_montage(std::size_t n) {
  std::vector<Electrode> electrodes;
  electrodes.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    // z from just below 1 down to 0.05, equal-area spacing over the cap.
    const double z = 1.0 - 0.95 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    char name[32];
    std::snprintf(name, sizeof name, "E%02zu", i);
    electrodes.push_back({name, Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), z).normalized()});
  }
  return Montage(std::move(electrodes));
}

Graph random_neighbor_graph(const Montage& montage, std::uint64_t seed, std::size_t k, double low, double high) {
  const std::size_t n = montage.size();
  if (!(low > 0.0 && low <= high)) throw invalid_input("random graph: need 0 < low <= high");
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) dist.emplace_back((montage[i].position - montage[j].position).norm(), j);
    std::sort(dist.begin(), dist.end());
    for (std::size_t r = 0; r < std::min(k, dist.size()); ++r) {
      w(i, dist[r].second) = 1.0;
      w(dist[r].second, i) = 1.0;
    }
  }
  detail::Rng rng(seed);
  std::uniform_real_distribution<double> weight(low, high);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (w(i, j) > 0.0) {
        const double v = weight(rng);
        w(i, j) = v;
        w(j, i) = v;
      }
    }
  }
  return Graph(montage, std::move(w));
}

double connecting_radius(const Montage& montage) {
  const std::size_t n = montage.size();
  if (n < 2) return 0.0;
  // Prim's algorithm on the complete distance graph.
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<unsigned char> in_tree(n, 0);
  best[0] = 0.0;
  double longest = 0.0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t v = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!in_tree[i] && (v == n || best[i] < best[v])) v = i;
    in_tree[v] = 1;
    longest = std::max(longest, best[v]);
    for (std::size_t u = 0; u < n; ++u)
      if (!in_tree[u]) best[u] = std::min(best[u], (montage[u].position - montage[v].position).norm());
  }
  return longest;
}

}  // namespace gsi
