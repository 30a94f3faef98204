#include "gsi/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

#include "gsi/error.hpp"
#include "gsi/graph_learning.hpp"
#include "gsi/simd.hpp"
#include "random.hpp"

namespace gsi {

Interpolator graph_interpolator(std::string name, const Graph& graph, double ridge) {
  auto lap = std::make_shared<const Laplacian>(build_laplacian(graph));
  return {std::move(name), [lap, ridge](const MaskSpec& mask, const Matrix& observed) {
            return InterpolationOperator(*lap, mask, ridge).reconstruct_missing(observed);
          }};
}

Interpolator spline_interpolator(std::string name, const Montage& montage, const SplineOptions& opt) {
  auto m = std::make_shared<const Montage>(montage);
  return {std::move(name), [m, opt](const MaskSpec& mask, const Matrix& observed) {
            return SphericalSplineOperator(*m, mask, opt).reconstruct_missing(observed);
          }};
}

Interpolator mean_interpolator(std::string name) {
  return {std::move(name), [](const MaskSpec& mask, const Matrix& observed) {
            const double mean = observed.size() ? observed.mean() : 0.0;
            return Matrix::Constant(static_cast<Eigen::Index>(mask.missing().size()), observed.cols(), mean);
          }};
}

const ReconCell& ReconReport::cell(const std::string& method, std::size_t n_missing) const {
  for (const ReconCell& c : cells)
    if (c.method == method && c.n_missing == n_missing) return c;
  throw invalid_input("report: no cell for " + method + " at " + std::to_string(n_missing));
}

std::string ReconReport::to_csv() const {
  std::string out = "method,n_missing,r2_mean,r2_std,mse_mean,mse_std,repetitions,seed\n";
  char line[256];
  for (const ReconCell& c : cells) {
    std::snprintf(line, sizeof line, "%s,%zu,%.10g,%.10g,%.10g,%.10g,%zu,%llu\n", c.method.c_str(), c.n_missing,
                  c.r2_mean, c.r2_std, c.mse_mean, c.mse_std, c.repetitions, static_cast<unsigned long long>(seed));
    out += line;
  }
  return out;
}

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  if (v.empty()) {
    mean = sd = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double s = 0.0;
  for (double x : v) s += x;
  mean = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
}

}  // namespace

ReconReport eval_masked_reconstruction(const EpochSet& data, std::span<const Interpolator> methods,
                                       std::span<const std::size_t> n_missing, std::size_t repetitions,
                                       std::uint64_t seed) {
  if (repetitions < 1) throw invalid_input("eval: repetitions must be at least 1");
  if (methods.empty()) throw invalid_input("eval: no methods");
  const std::size_t n = data.n_channels();
  for (std::size_t k : n_missing)
    if (k < 1 || k >= n) throw invalid_input("eval: n_missing must be in [1, n_channels), got " + std::to_string(k));

  const Matrix pooled = data.pooled();
  const std::size_t n_methods = methods.size();
  std::vector<std::vector<std::vector<double>>> r2(n_methods, std::vector<std::vector<double>>(n_missing.size()));
  std::vector<std::vector<std::vector<double>>> mse = r2;
  std::vector<std::vector<std::size_t>> failures(n_methods, std::vector<std::size_t>(n_missing.size(), 0));
  std::vector<std::vector<std::string>> errors(n_methods, std::vector<std::string>(n_missing.size()));

  detail::Rng rng(seed);
  for (std::size_t c = 0; c < n_missing.size(); ++c) {
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      const MaskSpec mask(n, detail::sample_indices(rng, n, n_missing[c]));
      const std::vector<Eigen::Index> oi(mask.observed().begin(), mask.observed().end());
      const std::vector<Eigen::Index> mi(mask.missing().begin(), mask.missing().end());
      const Matrix observed = pooled(oi, Eigen::all);
      const Matrix truth = pooled(mi, Eigen::all);
      for (std::size_t m = 0; m < n_methods; ++m) {
        try {
          const Matrix pred = methods[m].reconstruct(mask, observed);
          if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
            throw numeric_error("method returned a block of the wrong shape");
          const double score = r_squared(pred, truth);
          const double err = simd::sum_sq_diff({pred.data(), static_cast<std::size_t>(pred.size())},
                                               {truth.data(), static_cast<std::size_t>(truth.size())}) /
                             static_cast<double>(truth.size());
          if (!std::isfinite(score) || !std::isfinite(err)) throw numeric_error("non-finite score");
          r2[m][c].push_back(score);
          mse[m][c].push_back(err);
        } catch (const std::exception& e) {
          ++failures[m][c];
          errors[m][c] = e.what();
        }
      }
    }
  }

  ReconReport report;
  report.seed = seed;
  for (std::size_t m = 0; m < n_methods; ++m) {
    for (std::size_t c = 0; c < n_missing.size(); ++c) {
      ReconCell cell;
      cell.method = methods[m].name;
      cell.n_missing = n_missing[c];
      mean_std(r2[m][c], cell.r2_mean, cell.r2_std);
      mean_std(mse[m][c], cell.mse_mean, cell.mse_std);
      cell.repetitions = r2[m][c].size();
      cell.failures = failures[m][c];
      cell.last_error = errors[m][c];
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace gsi
