#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "gsi/error.hpp"
#include "gsi/interpolation.hpp"

namespace gsi {

double spline_kernel(double cos_angle, int order_m, int n_terms) {
  const double x = std::clamp(cos_angle, -1.0, 1.0);
  // Three-term recurrence: (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}.
  double p_prev = 1.0;  // P_0
  double p = x;         // P_1
  double total = 0.0;
  for (int n = 1; n <= n_terms; ++n) {
    const double nn = static_cast<double>(n);
    const double denom = std::pow(nn * (nn + 1.0), order_m);
    total += (2.0 * nn + 1.0) / denom * p;
    const double p_next = ((2.0 * nn + 1.0) * x * p - nn * p_prev) / (nn + 1.0);
    p_prev = p;
    p = p_next;
  }
  return total / (4.0 * std::numbers::pi);
}

SphericalSplineOperator::SphericalSplineOperator(const Montage& montage, const MaskSpec& mask, const SplineOptions& opt)
    : mask_(mask) {
  if (montage.size() != mask.size()) throw invalid_input("spherical spline: mask size does not match montage");
  if (opt.order_m < 1 || opt.n_terms < 1 || opt.ridge < 0.0) throw invalid_input("spherical spline: invalid options");
  const auto& obs = mask.observed();
  const auto& mis = mask.missing();
  const Eigen::Index k = static_cast<Eigen::Index>(obs.size());
  if (k < 3) throw invalid_input("spherical spline: need at least 3 observed electrodes, got " + std::to_string(k));
  if (mis.empty()) {
    weights_.resize(0, k);
    return;
  }

  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a + 1; b < k; ++b) {
      if ((montage[obs[a]].position - montage[obs[b]].position).norm() < 1e-9)
        throw numeric_error("spherical spline: electrodes '" + montage[obs[a]].name + "' and '" + montage[obs[b]].name +
                            "' coincide");
    }
  }

  // [G + ridge I, 1; 1^T, 0] [c; c0] = [v; 0]
  Matrix system = Matrix::Zero(k + 1, k + 1);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      const double g = spline_kernel(montage[obs[a]].position.dot(montage[obs[b]].position), opt.order_m, opt.n_terms);
      system(a, b) = g;
      system(b, a) = g;
    }
    system(a, a) += opt.ridge;
    system(a, k) = 1.0;
    system(k, a) = 1.0;
  }
  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) throw numeric_error("spherical spline: system matrix is singular");

  // Evaluation rows [g(q, p_1..p_k), 1] for each missing position q.
  Matrix eval(static_cast<Eigen::Index>(mis.size()), k + 1);
  for (std::size_t r = 0; r < mis.size(); ++r) {
    const auto& q = montage[mis[r]].position;
    for (Eigen::Index a = 0; a < k; ++a)
      eval(r, a) = spline_kernel(q.dot(montage[obs[a]].position), opt.order_m, opt.n_terms);
    eval(r, k) = 1.0;
  }
  // weights = eval * system^{-1}[:, :k]; system is symmetric so solve with the transpose.
  const Matrix full = lu.solve(eval.transpose()).transpose();
  weights_ = full.leftCols(k);
}

Matrix SphericalSplineOperator::apply(const Matrix& observed) const {
  if (observed.rows() != weights_.cols()) throw invalid_input("spherical spline: wrong number of observed rows");
  return assemble_rows(mask_, observed, reconstruct_missing(observed));
}

Vector SphericalSplineOperator::apply(const Vector& observed) const {
  return apply(Matrix(observed)).col(0);
}

Vector spherical_spline_interpolate(const Montage& montage, const Vector& observed_values, const MaskSpec& mask,
                                    const SplineOptions& opt) {
  return SphericalSplineOperator(montage, mask, opt).apply(observed_values);
}

}  // namespace gsi
