#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "gsi/linalg.hpp"

namespace gsi {

struct Electrode {
  std::string name;
  Eigen::Vector3d position;  // unit sphere
};

// Ordered, uniquely named electrodes on the unit sphere. Index order is the
// vertex order of every graph built over the montage.
class Montage {
 public:
  static constexpr double kUnitTolerance = 1e-6;

  Montage() = default;
  // Throws invalid_input on empty/duplicate names or positions off the unit sphere.
  explicit Montage(std::vector<Electrode> electrodes);

  // Positions are rescaled to unit norm (left untouched within 1e-12 of it);
  // fails if a norm is below 1e-6.
  static Montage normalized(std::vector<Electrode> electrodes);

  std::size_t size() const noexcept { return electrodes_.size(); }
  bool empty() const noexcept { return electrodes_.empty(); }
  const Electrode& operator[](std::size_t i) const { return electrodes_[i]; }
  const std::vector<Electrode>& electrodes() const noexcept { return electrodes_; }
  std::vector<std::string> names() const;

  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;  // throws invalid_input if absent

  // Electrodes named in `names`, in the given order.
  Montage select(std::span<const std::string> names) const;

  friend bool operator==(const Montage& a, const Montage& b);

 private:
  std::vector<Electrode> electrodes_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Undirected weighted graph over a montage. Weights are symmetric (exactly),
// nonnegative and have a zero diagonal.
class Graph {
 public:
  Graph(Montage montage, Matrix weights);

  std::size_t size() const noexcept { return weights_.rows(); }
  const Montage& montage() const noexcept { return *montage_; }
  const std::shared_ptr<const Montage>& montage_ptr() const noexcept { return montage_; }
  const Matrix& weights() const noexcept { return weights_; }

  // Induced subgraph on the named electrodes, in the given order.
  Graph subgraph(std::span<const std::string> names) const;

  // Checks the weight invariants without building a graph.
  static void validate_weights(const Matrix& w);

 private:
  Graph(std::shared_ptr<const Montage> montage, Matrix weights);

  std::shared_ptr<const Montage> montage_;
  Matrix weights_;
};

// L = D - W.
class Laplacian {
 public:
  Laplacian(std::shared_ptr<const Montage> montage, Matrix matrix)
      : montage_(std::move(montage)), matrix_(std::move(matrix)) {}

  std::size_t size() const noexcept { return matrix_.rows(); }
  const Matrix& matrix() const noexcept { return matrix_; }
  const Montage& montage() const noexcept { return *montage_; }
  const std::shared_ptr<const Montage>& montage_ptr() const noexcept { return montage_; }

 private:
  std::shared_ptr<const Montage> montage_;
  Matrix matrix_;
};

// L = U diag(eigenvalues) U^T with ascending eigenvalues. Each eigenvector is
// sign-fixed so its largest-magnitude entry is nonnegative (first index wins ties).
struct Spectrum {
  Vector eigenvalues;
  Matrix eigenvectors;
};

Matrix laplacian_matrix(const Matrix& weights);
Laplacian build_laplacian(const Graph& graph);
Spectrum spectrum(const Laplacian& lap);
Spectrum spectrum(const Matrix& symmetric);

Vector gft(const Spectrum& spec, const Vector& signal);
Vector inverse_gft(const Spectrum& spec, const Vector& coefficients);

// sigma(s) = s^T L s. This is the canonical value of the graph variation.
double total_variation(const Laplacian& lap, const Vector& signal);
// sum_i lambda_i * shat_i^2
double total_variation_spectral(const Spectrum& spec, const Vector& signal);
// sum over unordered pairs {i,j} of W_ij (s_i - s_j)^2. The sum over all
// ordered pairs is twice this, i.e. 2 s^T L s.
double total_variation_pairwise(const Graph& graph, const Vector& signal);

// Connected components over edges with weight > 0. Entry i is the component
// id of vertex i; ids are numbered in order of first appearance.
std::vector<std::size_t> connected_components(const Matrix& weights);
bool is_connected(const Matrix& weights);

}  // namespace gsi
