#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gsi/epochs.hpp"
#include "gsi/graph_core.hpp"
#include "gsi/interpolation.hpp"

namespace gsi {

// A reconstruction method under evaluation: given a mask and the observed
// rows (|Mbar| x T), returns the missing rows (|M| x T).
struct Interpolator {
  std::string name;
  std::function<Matrix(const MaskSpec& mask, const Matrix& observed)> reconstruct;
};

Interpolator graph_interpolator(std::string name, const Graph& graph, double ridge = kDefaultRidge);
Interpolator spline_interpolator(std::string name, const Montage& montage, const SplineOptions& opt = {});
// Predicts every missing entry as the mean of all observed entries.
Interpolator mean_interpolator(std::string name = "mean");

struct ReconCell {
  std::string method;
  std::size_t n_missing = 0;
  double r2_mean = 0.0;
  double r2_std = 0.0;  // sample standard deviation over repetitions (0 for one)
  double mse_mean = 0.0;
  double mse_std = 0.0;
  std::size_t repetitions = 0;  // successful repetitions
  std::size_t failures = 0;
  std::string last_error;
};

struct ReconReport {
  std::uint64_t seed = 0;
  std::vector<ReconCell> cells;  // method-major, then n_missing in the requested order

  const ReconCell& cell(const std::string& method, std::size_t n_missing) const;
  // header "method,n_missing,r2_mean,r2_std,mse_mean,mse_std,repetitions,seed"
  std::string to_csv() const;
};

// For every n_missing and repetition, draws one seeded uniform mask and
// scores every method on identical observations: R^2 pooled over all masked
// entries of all trials, and MSE. Method failures are counted per cell.
ReconReport eval_masked_reconstruction(const EpochSet& data, std::span<const Interpolator> methods,
                                       std::span<const std::size_t> n_missing, std::size_t repetitions,
                                       std::uint64_t seed);

}  // namespace gsi
