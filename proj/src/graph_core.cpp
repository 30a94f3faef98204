#include "gsi/graph_core.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "gsi/error.hpp"
#include "gsi/simd.hpp"

namespace gsi {

Montage::Montage(std::vector<Electrode> electrodes) : electrodes_(std::move(electrodes)) {
  index_.reserve(electrodes_.size());
  for (std::size_t i = 0; i < electrodes_.size(); ++i) {
    const Electrode& e = electrodes_[i];
    if (e.name.empty()) throw invalid_input("montage: empty electrode name at index " + std::to_string(i));
    if (!e.position.allFinite() || std::abs(e.position.norm() - 1.0) > kUnitTolerance)
      throw invalid_input("montage: position of '" + e.name + "' is not on the unit sphere");
    if (!index_.emplace(e.name, i).second) throw invalid_input("montage: duplicate electrode name '" + e.name + "'");
  }
}

Montage Montage::normalized(std::vector<Electrode> electrodes) {
  for (Electrode& e : electrodes) {
    const double norm = e.position.norm();
    if (!(norm >= 1e-6)) throw invalid_input("montage: electrode '" + e.name + "' has a degenerate position");
    // Already-unit positions are kept bit-exact so files round-trip.
    if (std::abs(norm - 1.0) > 1e-12) e.position /= norm;
  }
  return Montage(std::move(electrodes));
}

std::vector<std::string> Montage::names() const {
  std::vector<std::string> out;
  out.reserve(electrodes_.size());
  for (const Electrode& e : electrodes_) out.push_back(e.name);
  return out;
}

std::optional<std::size_t> Montage::find(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Montage::index_of(const std::string& name) const {
  const auto idx = find(name);
  if (!idx) throw invalid_input("montage: unknown electrode '" + name + "'");
  return *idx;
}

Montage Montage::select(std::span<const std::string> names) const {
  std::vector<Electrode> out;
  out.reserve(names.size());
  for (const std::string& n : names) out.push_back(electrodes_[index_of(n)]);
  return Montage(std::move(out));
}

bool operator==(const Montage& a, const Montage& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].position != b[i].position) return false;
  }
  return true;
}

void Graph::validate_weights(const Matrix& w) {
  if (w.rows() != w.cols()) throw invalid_input("graph: weight matrix is not square");
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (w(i, i) != 0.0) throw invalid_input("graph: nonzero diagonal at " + std::to_string(i));
    for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
      const double v = w(i, j);
      if (!std::isfinite(v) || v < 0.0)
        throw invalid_input("graph: weight (" + std::to_string(i) + "," + std::to_string(j) + ") is negative or non-finite");
      if (w(j, i) != v)
        throw invalid_input("graph: weights not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
}

Graph::Graph(Montage montage, Matrix weights)
    : Graph(std::make_shared<const Montage>(std::move(montage)), std::move(weights)) {}

Graph::Graph(std::shared_ptr<const Montage> montage, Matrix weights)
    : montage_(std::move(montage)), weights_(std::move(weights)) {
  if (static_cast<std::size_t>(weights_.rows()) != montage_->size())
    throw invalid_input("graph: weight matrix size " + std::to_string(weights_.rows()) +
                        " does not match montage size " + std::to_string(montage_->size()));
  validate_weights(weights_);
}

Graph Graph::subgraph(std::span<const std::string> names) const {
  std::vector<Eigen::Index> idx;
  idx.reserve(names.size());
  for (const std::string& n : names) idx.push_back(static_cast<Eigen::Index>(montage_->index_of(n)));
  return Graph(montage_->select(names), weights_(idx, idx));
}

Matrix laplacian_matrix(const Matrix& weights) {
  Matrix lap = -weights;
  const Vector degrees = weights.rowwise().sum();
  for (Eigen::Index i = 0; i < lap.rows(); ++i) lap(i, i) = degrees(i) - weights(i, i);
  return lap;
}

Laplacian build_laplacian(const Graph& graph) {
  return Laplacian(graph.montage_ptr(), laplacian_matrix(graph.weights()));
}

Spectrum spectrum(const Matrix& symmetric) {
  const Eigen::Index n = symmetric.rows();
  Spectrum out;
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
  if (solver.info() != Eigen::Success) throw numeric_error("spectrum: eigendecomposition did not converge");
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  for (Eigen::Index k = 0; k < n; ++k) {
    auto col = out.eigenvectors.col(k);
    const double peak = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) >= peak * (1.0 - 1e-12)) {
        if (col(i) < 0.0) col = -col;
        break;
      }
    }
  }
  return out;
}

Spectrum spectrum(const Laplacian& lap) { return spectrum(lap.matrix()); }

Vector gft(const Spectrum& spec, const Vector& signal) {
  if (signal.size() != spec.eigenvectors.rows()) throw invalid_input("gft: signal length does not match graph size");
  return spec.eigenvectors.transpose() * signal;
}

Vector inverse_gft(const Spectrum& spec, const Vector& coefficients) {
  if (coefficients.size() != spec.eigenvectors.cols()) throw invalid_input("inverse_gft: length does not match graph size");
  return spec.eigenvectors * coefficients;
}

double total_variation(const Laplacian& lap, const Vector& signal) {
  if (signal.size() != static_cast<Eigen::Index>(lap.size()))
    throw invalid_input("total_variation: signal length does not match graph size");
  const Vector ls = lap.matrix() * signal;
  return simd::dot({signal.data(), static_cast<std::size_t>(signal.size())},
                   {ls.data(), static_cast<std::size_t>(ls.size())});
}

double total_variation_spectral(const Spectrum& spec, const Vector& signal) {
  const Vector shat = gft(spec, signal);
  return spec.eigenvalues.dot(shat.cwiseAbs2());
}

double total_variation_pairwise(const Graph& graph, const Vector& signal) {
  const std::size_t n = graph.size();
  if (static_cast<std::size_t>(signal.size()) != n)
    throw invalid_input("total_variation_pairwise: signal length does not match graph size");
  // Column j of W (= row j by symmetry) is contiguous in column-major storage.
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    total += simd::weighted_sq_diff({graph.weights().col(j).data(), n}, {signal.data(), n}, signal(j));
  }
  return 0.5 * total;
}

std::vector<std::size_t> connected_components(const Matrix& weights) {
  const std::size_t n = weights.rows();
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(n, unset);
  std::vector<std::size_t> stack;
  std::size_t next = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (comp[root] != unset) continue;
    comp[root] = next;
    stack.push_back(root);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u = 0; u < n; ++u) {
        if (comp[u] == unset && weights(v, u) > 0.0) {
          comp[u] = next;
          stack.push_back(u);
        }
      }
    }
    ++next;
  }
  return comp;
}

bool is_connected(const Matrix& weights) {
  const auto comp = connected_components(weights);
  for (std::size_t c : comp)
    if (c != 0) return false;
  return true;
}

}  // namespace gsi
