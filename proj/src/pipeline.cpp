#include "gsi/pipeline.hpp"

#include <cmath>
#include <complex>
#include <map>

#include <Eigen/Eigenvalues>

#include "fft.hpp"
#include "gsi/error.hpp"
#include "gsi/interpolation.hpp"

namespace gsi {

EpochSet resample(const EpochSet& epochs, double target_rate) {
  const double rate = epochs.rate();
  if (!(target_rate > 0.0)) throw invalid_input("resample: target rate must be positive");
  if (target_rate > rate) throw invalid_input("resample: upsampling is not supported");
  if (target_rate == rate) return epochs;

  const std::size_t n_in = epochs.n_samples();
  const auto n_out = static_cast<std::size_t>(std::floor(static_cast<double>(n_in) * target_rate / rate + 1e-9));
  EpochSet out(epochs.n_trials(), epochs.channel_names(), n_out, target_rate);
  out.set_labels(epochs.labels());
  out.set_subjects(epochs.subjects());
  if (n_in == 0 || n_out == 0) return out;

  detail::RealFft fwd(n_in);
  detail::RealFft inv(n_out);
  std::vector<std::complex<double>> spec_in(fwd.bins());
  std::vector<std::complex<double>> spec_out(inv.bins());
  const std::size_t keep = n_out / 2 + 1;
  const double scale = 1.0 / static_cast<double>(n_in);

  for (std::size_t t = 0; t < epochs.n_trials(); ++t) {
    for (std::size_t ch = 0; ch < epochs.n_channels(); ++ch) {
      fwd.forward(epochs.row(t, ch).data(), spec_in.data());
      std::fill(spec_out.begin(), spec_out.end(), std::complex<double>{});
      for (std::size_t k = 0; k < keep && k < spec_in.size(); ++k) spec_out[k] = spec_in[k];
      // An even-length output has a single real Nyquist bin; energy exactly
      // there cannot be represented unambiguously, so it is dropped.
      if (n_out % 2 == 0) spec_out[n_out / 2] = 0.0;
      auto dst = out.row(t, ch);
      inv.inverse(spec_out.data(), dst.data());
      for (double& v : dst) v *= scale;
    }
  }
  return out;
}

EpochSet window(const EpochSet& epochs, double start_s, double duration_s) {
  if (!(start_s >= 0.0) || !(duration_s >= 0.0)) throw invalid_input("window: start and duration must be nonnegative");
  const auto start = static_cast<std::size_t>(std::llround(start_s * epochs.rate()));
  const auto len = static_cast<std::size_t>(std::llround(duration_s * epochs.rate()));
  if (start + len > epochs.n_samples())
    throw invalid_input("window: [" + std::to_string(start) + ", " + std::to_string(start + len) +
                        ") exceeds trial length " + std::to_string(epochs.n_samples()));
  EpochSet out(epochs.n_trials(), epochs.channel_names(), len, epochs.rate());
  out.set_labels(epochs.labels());
  out.set_subjects(epochs.subjects());
  for (std::size_t t = 0; t < epochs.n_trials(); ++t) {
    for (std::size_t ch = 0; ch < epochs.n_channels(); ++ch) {
      const auto src = epochs.row(t, ch);
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(start), len, out.row(t, ch).begin());
    }
  }
  return out;
}

namespace {

Matrix inverse_sqrt(const Matrix& r) {
  const Eigen::Index n = r.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(r);
  if (solver.info() != Eigen::Success) throw numeric_error("euclidean_align: eigendecomposition failed");
  const Vector& ev = solver.eigenvalues();
  const double ridge = 1e-10 * r.trace() / static_cast<double>(n);
  if (!(ev.minCoeff() > ridge)) throw numeric_error("euclidean_align: mean covariance is singular");
  const double floor = 1e-10 * ev.maxCoeff();
  const Vector inv_sqrt = ev.cwiseMax(floor).cwiseSqrt().cwiseInverse();
  return solver.eigenvectors() * inv_sqrt.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

EpochSet euclidean_align(const EpochSet& epochs) {
  if (epochs.n_trials() == 0) throw invalid_input("euclidean_align: no trials");
  if (epochs.n_samples() == 0) throw invalid_input("euclidean_align: empty trials");

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t t = 0; t < epochs.n_trials(); ++t)
    groups[epochs.subjects().empty() ? std::string() : epochs.subjects()[t]].push_back(t);

  EpochSet out = epochs;
  const Eigen::Index n = static_cast<Eigen::Index>(epochs.n_channels());
  for (const auto& [subject, trials] : groups) {
    Matrix mean_cov = Matrix::Zero(n, n);
    for (std::size_t t : trials) {
      const auto x = epochs.trial(t);
      mean_cov.noalias() += x * x.transpose();
    }
    mean_cov /= static_cast<double>(trials.size() * epochs.n_samples());
    const Matrix whitener = inverse_sqrt(mean_cov);
    for (std::size_t t : trials) out.trial(t) = whitener * epochs.trial(t);
  }
  return out;
}

UnionMontage make_union_montage(const Montage& reference, std::span<const std::vector<std::string>> dataset_channels) {
  std::vector<bool> used(reference.size(), false);
  std::string unknown;
  for (const auto& names : dataset_channels) {
    for (const std::string& name : names) {
      if (const auto idx = reference.find(name)) {
        used[*idx] = true;
      } else {
        unknown += (unknown.empty() ? "" : ",") + name;
      }
    }
  }
  if (!unknown.empty()) throw invalid_input("union montage: electrodes not in the reference montage: " + unknown);

  std::vector<std::string> union_names;
  for (std::size_t i = 0; i < reference.size(); ++i)
    if (used[i]) union_names.push_back(reference[i].name);
  UnionMontage out{reference.select(union_names), {}};
  for (const auto& names : dataset_channels) {
    std::vector<bool> present(out.montage.size(), false);
    for (const std::string& name : names) present[out.montage.index_of(name)] = true;
    out.presence.push_back(std::move(present));
  }
  return out;
}

EpochSet map_to_union(const EpochSet& epochs, const UnionMontage& union_montage, const Graph& graph,
                      std::span<const std::string> target_names) {
  const Montage& um = union_montage.montage;
  if (graph.montage().names() != um.names()) throw invalid_input("map_to_union: graph montage differs from the union montage");

  // Union index -> input channel index for recorded electrodes.
  std::vector<std::size_t> missing;
  std::vector<std::size_t> source(um.size(), static_cast<std::size_t>(-1));
  for (std::size_t c = 0; c < epochs.n_channels(); ++c) {
    const auto idx = um.find(epochs.channel_names()[c]);
    if (!idx) throw invalid_input("map_to_union: channel '" + epochs.channel_names()[c] + "' is not in the union montage");
    source[*idx] = c;
  }
  for (std::size_t i = 0; i < um.size(); ++i)
    if (source[i] == static_cast<std::size_t>(-1)) missing.push_back(i);

  std::vector<std::size_t> target_idx;
  bool needs_interpolation = false;
  for (const std::string& name : target_names) {
    const auto idx = um.find(name);
    if (!idx) throw invalid_input("map_to_union: target '" + name + "' is not in the union montage");
    target_idx.push_back(*idx);
    needs_interpolation = needs_interpolation || source[*idx] == static_cast<std::size_t>(-1);
  }

  EpochSet out(epochs.n_trials(), {target_names.begin(), target_names.end()}, epochs.n_samples(), epochs.rate());
  out.set_labels(epochs.labels());
  out.set_subjects(epochs.subjects());

  if (!needs_interpolation) {
    for (std::size_t t = 0; t < epochs.n_trials(); ++t) {
      for (std::size_t k = 0; k < target_idx.size(); ++k) {
        const auto src = epochs.row(t, source[target_idx[k]]);
        std::copy(src.begin(), src.end(), out.row(t, k).begin());
      }
    }
    return out;
  }

  const MaskSpec mask(um.size(), missing);
  const InterpolationOperator op(build_laplacian(graph), mask);
  const auto& observed = mask.observed();
  const auto ns = static_cast<Eigen::Index>(epochs.n_samples());
  Matrix obs(static_cast<Eigen::Index>(observed.size()), ns);
  for (std::size_t t = 0; t < epochs.n_trials(); ++t) {
    const auto x = epochs.trial(t);
    for (std::size_t k = 0; k < observed.size(); ++k) obs.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(source[observed[k]]));
    const Matrix full = op.apply(obs);
    auto y = out.trial(t);
    for (std::size_t k = 0; k < target_idx.size(); ++k) y.row(static_cast<Eigen::Index>(k)) = full.row(static_cast<Eigen::Index>(target_idx[k]));
  }
  return out;
}

}  // namespace gsi
