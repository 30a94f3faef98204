#include "gsi/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "gsi/error.hpp"

namespace gsi {
namespace {

std::vector<Eigen::Index> as_index(const std::vector<std::size_t>& v) {
  return {v.begin(), v.end()};
}

std::string index_list(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

MaskSpec::MaskSpec(std::size_t n_vertices, std::vector<std::size_t> missing)
    : n_(n_vertices), missing_(std::move(missing)), flags_(n_vertices, 0) {
  std::sort(missing_.begin(), missing_.end());
  for (std::size_t i = 0; i < missing_.size(); ++i) {
    if (missing_[i] >= n_) throw invalid_input("mask: index " + std::to_string(missing_[i]) + " out of range");
    if (i > 0 && missing_[i] == missing_[i - 1]) throw invalid_input("mask: duplicate index " + std::to_string(missing_[i]));
    flags_[missing_[i]] = 1;
  }
  observed_.reserve(n_ - missing_.size());
  for (std::size_t i = 0; i < n_; ++i)
    if (!flags_[i]) observed_.push_back(i);
  if (observed_.empty()) throw invalid_input("mask: at least one vertex must be observed");
}

MaskSpec MaskSpec::from_names(const Montage& montage, std::span<const std::string> missing_names) {
  std::vector<std::size_t> idx;
  idx.reserve(missing_names.size());
  for (const std::string& n : missing_names) idx.push_back(montage.index_of(n));
  return MaskSpec(montage.size(), std::move(idx));
}

std::vector<std::size_t> unreachable_missing(const Matrix& weights, const MaskSpec& mask, double min_weight) {
  const std::size_t n = mask.size();
  if (static_cast<std::size_t>(weights.rows()) != n) throw invalid_input("unreachable_missing: size mismatch");
  std::vector<unsigned char> seen(n, 0);
  std::vector<std::size_t> stack(mask.observed().begin(), mask.observed().end());
  for (std::size_t v : stack) seen[v] = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u = 0; u < n; ++u) {
      if (!seen[u] && u != v && weights(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) > min_weight) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i : mask.missing())
    if (!seen[i]) out.push_back(i);
  return out;
}

PartitionedLaplacian partition_laplacian(const Matrix& lap, const MaskSpec& mask) {
  if (static_cast<std::size_t>(lap.rows()) != mask.size())
    throw invalid_input("partition_laplacian: mask size does not match the Laplacian");
  PartitionedLaplacian part;
  part.missing = mask.missing();
  part.observed = mask.observed();
  const auto m = as_index(part.missing);
  const auto o = as_index(part.observed);
  part.missing_block = lap(m, m);
  part.cross_block = lap(m, o);
  return part;
}

PartitionedLaplacian partition_laplacian(const Laplacian& lap, const MaskSpec& mask) {
  return partition_laplacian(lap.matrix(), mask);
}

InterpolationOperator::InterpolationOperator(const Laplacian& lap, const MaskSpec& mask, double ridge)
    : InterpolationOperator(lap.matrix(), mask, ridge) {}

InterpolationOperator::InterpolationOperator(const Matrix& lap, const MaskSpec& mask, double ridge)
    : mask_(mask), part_(partition_laplacian(lap, mask)) {
  const Eigen::Index m = part_.missing_block.rows();
  if (m == 0) return;
  if (const auto bad = unreachable_missing(-lap, mask_); !bad.empty()) {
    throw singular_error("interpolate: missing vertices [" + index_list(bad) +
                             "] are not connected to any observed vertex",
                         bad);
  }
  shift_ = ridge * part_.missing_block.trace() / static_cast<double>(m);
  Matrix shifted = part_.missing_block;
  shifted.diagonal().array() += shift_;
  factor_.compute(shifted);
  if (factor_.info() != Eigen::Success)
    throw singular_error("interpolate: missing block is not positive definite", mask_.missing());
}

Matrix InterpolationOperator::solve(const Eigen::Ref<const Matrix>& rhs) const {
  if (rhs.rows() != part_.missing_block.rows()) throw invalid_input("interpolate: right-hand side has the wrong row count");
  if (rhs.rows() == 0) return Matrix(0, rhs.cols());
  // One refinement step against the unshifted block removes most of the ridge bias.
  Matrix x = factor_.solve(rhs);
  x += factor_.solve(rhs - part_.missing_block * x);
  const double rhs_norm = rhs.norm();
  const double res = (part_.missing_block * x - rhs).norm();
  if (!std::isfinite(res) || res > kResidualTolerance * rhs_norm)
    throw singular_error("interpolate: solve residual " + std::to_string(rhs_norm > 0 ? res / rhs_norm : res) +
                             " exceeds tolerance",
                         mask_.missing());
  return x;
}

Matrix InterpolationOperator::reconstruct_missing(const Eigen::Ref<const Matrix>& observed) const {
  if (static_cast<std::size_t>(observed.rows()) != mask_.observed().size())
    throw invalid_input("interpolate: expected " + std::to_string(mask_.observed().size()) + " observed rows, got " +
                        std::to_string(observed.rows()));
  if (part_.missing_block.rows() == 0) return Matrix(0, observed.cols());
  return -solve(part_.cross_block * observed);
}

Matrix InterpolationOperator::apply(const Matrix& observed) const {
  return assemble_rows(mask_, observed, reconstruct_missing(observed));
}

Vector InterpolationOperator::apply(const Vector& observed) const {
  return apply(Matrix(observed)).col(0);
}

Vector interpolate(const Laplacian& lap, const Vector& observed_values, const MaskSpec& mask) {
  return InterpolationOperator(lap, mask).apply(observed_values);
}

Matrix assemble_rows(const MaskSpec& mask, const Eigen::Ref<const Matrix>& observed,
                     const Eigen::Ref<const Matrix>& missing) {
  const auto& o = mask.observed();
  const auto& m = mask.missing();
  if (static_cast<std::size_t>(observed.rows()) != o.size() || static_cast<std::size_t>(missing.rows()) != m.size() ||
      observed.cols() != missing.cols())
    throw invalid_input("assemble_rows: block shapes do not match the mask");
  Matrix full(mask.size(), observed.cols());
  for (std::size_t k = 0; k < o.size(); ++k) full.row(o[k]) = observed.row(k);
  for (std::size_t k = 0; k < m.size(); ++k) full.row(m[k]) = missing.row(k);
  return full;
}

}  // namespace gsi
