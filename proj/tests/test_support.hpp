#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "gsi/epochs.hpp"
#include "gsi/graph_core.hpp"
#include "gsi/interpolation.hpp"

namespace gsi::testing {

inline Montage random_montage(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Electrode> e;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3d p(g(rng), g(rng), std::abs(g(rng)) + 0.1);
    e.push_back({"N" + std::to_string(i), p.normalized()});
  }
  return Montage(std::move(e));
}

// Random spanning tree plus extra edges, weights in [0.1, 2].
inline Matrix random_connected_weights(std::size_t n, std::mt19937_64& rng, double extra_density = 0.3) {
  std::uniform_real_distribution<double> w(0.1, 2.0), u(0.0, 1.0);
  Matrix W = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    const auto j = static_cast<Eigen::Index>(parent(rng));
    const auto ii = static_cast<Eigen::Index>(i);
    W(ii, j) = W(j, ii) = w(rng);
  }
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = i + 1; j < W.cols(); ++j)
      if (W(i, j) == 0.0 && u(rng) < extra_density) W(i, j) = W(j, i) = w(rng);
  return W;
}

inline Graph random_graph(std::size_t n, std::mt19937_64& rng, double extra_density = 0.3) {
  Matrix W = random_connected_weights(n, rng, extra_density);
  return Graph(random_montage(n, rng), std::move(W));
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = g(rng);
  return v;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (auto& x : m.reshaped()) x = g(rng);
  return m;
}

inline MaskSpec random_mask(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(k);
  return MaskSpec(n, idx);
}

// Minimizes sum_{i<j} W_ij (s_i - s_j)^2 over the missing entries as a
// weighted least-squares problem on the edge list, without forming L.
inline Vector least_squares_oracle(const Matrix& W, const MaskSpec& mask, const Vector& observed) {
  const auto n = static_cast<std::size_t>(W.rows());
  std::vector<long> slot(n, -1);
  for (std::size_t k = 0; k < mask.missing().size(); ++k) slot[mask.missing()[k]] = static_cast<long>(k);
  std::vector<double> obs(n, 0.0);
  for (std::size_t k = 0; k < mask.observed().size(); ++k) obs[mask.observed()[k]] = observed(static_cast<Eigen::Index>(k));
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0 && (slot[i] >= 0 || slot[j] >= 0)) edges.emplace_back(i, j);
  Matrix A = Matrix::Zero(static_cast<Eigen::Index>(edges.size()), static_cast<Eigen::Index>(mask.missing().size()));
  Vector b = Vector::Zero(static_cast<Eigen::Index>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    const double r = std::sqrt(W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    const auto row = static_cast<Eigen::Index>(e);
    if (slot[i] >= 0) A(row, slot[i]) += r; else b(row) -= r * obs[i];
    if (slot[j] >= 0) A(row, slot[j]) -= r; else b(row) += r * obs[j];
  }
  return A.completeOrthogonalDecomposition().solve(b);
}

inline double rel_err(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("gsi_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace gsi::testing
