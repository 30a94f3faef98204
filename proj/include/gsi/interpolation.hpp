#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "gsi/graph_core.hpp"
#include "gsi/linalg.hpp"

namespace gsi {

// Partition of the vertex set into missing and observed indices, both sorted.
class MaskSpec {
 public:
  // Throws invalid_input on out-of-range or duplicate indices, or when
  // nothing would remain observed.
  MaskSpec(std::size_t n_vertices, std::vector<std::size_t> missing);
  static MaskSpec from_names(const Montage& montage, std::span<const std::string> missing_names);

  std::size_t size() const noexcept { return n_; }
  const std::vector<std::size_t>& missing() const noexcept { return missing_; }
  const std::vector<std::size_t>& observed() const noexcept { return observed_; }
  bool is_missing(std::size_t i) const { return flags_.at(i) != 0; }

  friend bool operator==(const MaskSpec& a, const MaskSpec& b) { return a.n_ == b.n_ && a.missing_ == b.missing_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> missing_;
  std::vector<std::size_t> observed_;
  std::vector<unsigned char> flags_;
};

struct PartitionedLaplacian {
  Matrix missing_block;  // L restricted to rows and columns in the missing set
  Matrix cross_block;    // rows in the missing set, columns in the observed set
  std::vector<std::size_t> missing;
  std::vector<std::size_t> observed;
};

PartitionedLaplacian partition_laplacian(const Laplacian& lap, const MaskSpec& mask);

// Missing vertices with no path to an observed vertex through edges heavier
// than min_weight.
std::vector<std::size_t> unreachable_missing(const Matrix& weights, const MaskSpec& mask, double min_weight = 0.0);
PartitionedLaplacian partition_laplacian(const Matrix& lap, const MaskSpec& mask);

// Relative ridge added to the missing block: eps = factor * trace(L_M) / |M|.
inline constexpr double kDefaultRidge = 1e-9;
// Solves whose relative residual exceeds this are reported as singular.
inline constexpr double kResidualTolerance = 1e-6;

// Minimizer of s^T L s over the missing entries with the observed entries
// held fixed: s_M = -L_M^{-1} L_{M,Mbar} s_Mbar. The Cholesky factor of the
// (ridged) missing block is computed once and reused for every signal.
class InterpolationOperator {
 public:
  InterpolationOperator(const Laplacian& lap, const MaskSpec& mask, double ridge = kDefaultRidge);
  InterpolationOperator(const Matrix& lap, const MaskSpec& mask, double ridge = kDefaultRidge);

  const MaskSpec& mask() const noexcept { return mask_; }
  const PartitionedLaplacian& partition() const noexcept { return part_; }
  double ridge_shift() const noexcept { return shift_; }

  // observed: |Mbar| x T, one column per time sample. Returns |M| x T.
  Matrix reconstruct_missing(const Eigen::Ref<const Matrix>& observed) const;
  // Same input; returns the full n x T signal with observed rows copied through.
  Matrix apply(const Matrix& observed) const;
  Vector apply(const Vector& observed) const;

  // L_M^{-1} rhs through the ridged factor plus one refinement step, with the
  // residual check applied.
  Matrix solve(const Eigen::Ref<const Matrix>& rhs) const;

 private:
  MaskSpec mask_;
  PartitionedLaplacian part_;
  double shift_ = 0.0;
  Eigen::LLT<Matrix> factor_;
};

// Full signal (length n) from the observed values (length |Mbar|, in mask.observed() order).
Vector interpolate(const Laplacian& lap, const Vector& observed_values, const MaskSpec& mask);

// Spherical splines of order m (Legendre series truncated at n_terms).
struct SplineOptions {
  int order_m = 4;
  int n_terms = 50;
  double ridge = 1e-5;
};

// g(x) = 1/(4 pi) * sum_{n=1}^{n_terms} (2n+1) / (n^m (n+1)^m) P_n(x)
double spline_kernel(double cos_angle, int order_m, int n_terms);

// Linear map from observed to missing values on the sphere.
class SphericalSplineOperator {
 public:
  SphericalSplineOperator(const Montage& montage, const MaskSpec& mask, const SplineOptions& opt = {});

  const MaskSpec& mask() const noexcept { return mask_; }
  const Matrix& weights() const noexcept { return weights_; }  // |M| x |Mbar|

  Matrix reconstruct_missing(const Eigen::Ref<const Matrix>& observed) const { return weights_ * observed; }
  Matrix apply(const Matrix& observed) const;
  Vector apply(const Vector& observed) const;

 private:
  MaskSpec mask_;
  Matrix weights_;
};

Vector spherical_spline_interpolate(const Montage& montage, const Vector& observed_values, const MaskSpec& mask,
                                    const SplineOptions& opt = {});

// Scatter helpers shared by the operators: combine observed and missing rows
// into a full n x T matrix.
Matrix assemble_rows(const MaskSpec& mask, const Eigen::Ref<const Matrix>& observed,
                     const Eigen::Ref<const Matrix>& missing);

}  // namespace gsi
