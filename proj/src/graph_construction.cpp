#include "gsi/graph_construction.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "fft.hpp"
#include "gsi/error.hpp"
#include "gsi/simd.hpp"

namespace gsi {

Graph spatial_graph(const Montage& montage, double radius) {
  if (!(radius > 0.0)) throw invalid_input("spatial_graph: radius must be positive");
  const std::size_t n = montage.size();
  Matrix w = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (montage[i].position - montage[j].position).norm();
      if (d > 0.0 && d <= radius) {
        w(i, j) = 1.0;
        w(j, i) = 1.0;
      }
    }
  }
  return Graph(montage, std::move(w));
}

namespace {

std::vector<double> make_taper(Taper taper, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (taper == Taper::hann) {
    for (std::size_t i = 0; i < n; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

}  // namespace

Matrix wpli_matrix(const EpochSet& epochs, const SpectralEstimationConfig& cfg) {
  const std::size_t n_ch = epochs.n_channels();
  if (n_ch < 2) throw invalid_input("wpli: need at least 2 channels");
  const double rate = epochs.rate();
  const std::size_t seg = cfg.segment_length ? cfg.segment_length : static_cast<std::size_t>(std::lround(rate));
  if (seg < 2) throw invalid_input("wpli: segment length must be at least 2 samples");
  if (!(cfg.overlap >= 0.0 && cfg.overlap < 1.0)) throw invalid_input("wpli: overlap must be in [0, 1)");
  if (!(cfg.band_low > 0.0 && cfg.band_low < cfg.band_high && cfg.band_high < rate / 2.0))
    throw invalid_input("wpli: band must satisfy 0 < low < high < Nyquist");
  if (epochs.n_trials() == 0 || epochs.n_samples() < seg)
    throw invalid_input("wpli: not enough samples for one segment");

  const std::size_t step = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(seg * (1.0 - cfg.overlap))));
  const std::size_t n_seg = (epochs.n_samples() - seg) / step + 1;

  detail::RealFft fft(seg);
  std::size_t bin_lo = fft.bins(), bin_hi = 0;
  for (std::size_t k = 0; k < fft.bins(); ++k) {
    const double f = static_cast<double>(k) * rate / static_cast<double>(seg);
    if (f >= cfg.band_low && f <= cfg.band_high) {
      bin_lo = std::min(bin_lo, k);
      bin_hi = std::max(bin_hi, k + 1);
    }
  }
  if (bin_lo >= bin_hi) throw invalid_input("wpli: no frequency bins inside the band");
  const std::size_t nb = bin_hi - bin_lo;
  const std::size_t width = n_seg * nb;

  const std::vector<double> taper = make_taper(cfg.taper, seg);
  std::vector<double> buf(seg);
  std::vector<std::complex<double>> spec(fft.bins());
  // Split real/imaginary in-band spectra of one trial, per channel.
  std::vector<double> re(n_ch * width), im(n_ch * width);
  std::vector<simd::CrossImag> acc(n_ch * n_ch);
  const simd::KernelTable& kernels = simd::active();

  for (std::size_t t = 0; t < epochs.n_trials(); ++t) {
    for (std::size_t ch = 0; ch < n_ch; ++ch) {
      const auto x = epochs.row(t, ch);
      for (std::size_t s = 0; s < n_seg; ++s) {
        const std::size_t start = s * step;
        for (std::size_t i = 0; i < seg; ++i) buf[i] = x[start + i] * taper[i];
        fft.forward(buf.data(), spec.data());
        for (std::size_t b = 0; b < nb; ++b) {
          re[ch * width + s * nb + b] = spec[bin_lo + b].real();
          im[ch * width + s * nb + b] = spec[bin_lo + b].imag();
        }
      }
    }
    for (std::size_t i = 0; i < n_ch; ++i) {
      for (std::size_t j = i + 1; j < n_ch; ++j) {
        kernels.cross_imag(&re[i * width], &im[i * width], &re[j * width], &im[j * width], width, &acc[i * n_ch + j]);
      }
    }
  }

  Matrix out = Matrix::Zero(n_ch, n_ch);
  for (std::size_t i = 0; i < n_ch; ++i) {
    for (std::size_t j = i + 1; j < n_ch; ++j) {
      const simd::CrossImag& a = acc[i * n_ch + j];
      double v = 0.0;
      if (a.sum_abs_imag > 0.0 && a.sum_abs_imag >= 1e-12 * a.sum_magnitude) v = std::min(1.0, std::abs(a.sum_imag) / a.sum_abs_imag);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Graph wpli_weighted_spatial(const Graph& spatial, const Matrix& wpli) {
  if (wpli.rows() != static_cast<Eigen::Index>(spatial.size()) || wpli.cols() != wpli.rows())
    throw invalid_input("wpli_weighted_spatial: WPLI matrix does not match the graph size");
  // WPLI is symmetric; averaging the two triangles only guards against
  // round-off asymmetry in externally supplied matrices.
  Matrix w = Matrix::Zero(wpli.rows(), wpli.cols());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
      const double v = spatial.weights()(i, j) * 0.5 * (wpli(i, j) + wpli(j, i));
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return Graph(spatial.montage(), std::move(w));
}

}  // namespace gsi
