#include "freqlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace freqlab::spectrum {

SpectrumView dft(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n == 0) throw Error(Errc::EmptyDataset, "dft: empty sequence");
  // twiddle table on exact residues j*k mod n keeps the angles well-conditioned
  std::vector<std::complex<double>> w(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n);
    w[t] = {std::cos(angle), std::sin(angle)};
  }
  SpectrumView view;
  view.coef.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) acc += samples[j] * w[(j * k) % n];
    view.coef[k] = acc / static_cast<double>(n);
  }
  return view;
}

double relative_spectral_error(const SpectrumView& target, const SpectrumView& output, std::size_t k) {
  if (k >= target.size() || k >= output.size())
    throw Error(Errc::DimensionMismatch, "relative_spectral_error: k out of range");
  const double denom = target.modulus(k);
  if (denom == 0.0) throw Error(Errc::ZeroTargetFrequency, "relative_spectral_error: target modulus is zero");
  return std::abs(output.coef[k] - target.coef[k]) / denom;
}

std::vector<std::size_t> select_peak_frequencies(const SpectrumView& target, double threshold_ratio) {
  if (!(threshold_ratio > 0.0) || threshold_ratio > 1.0)
    throw Error(Errc::ConfigError, "select_peak_frequencies: ratio must be in (0, 1]");
  const std::size_t half = target.size() / 2;
  double peak = 0.0;
  for (std::size_t k = 0; k <= half; ++k) peak = std::max(peak, target.modulus(k));
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k <= half; ++k)
    if (target.modulus(k) >= threshold_ratio * peak) keep.push_back(k);
  return keep;
}

GaussianFilter::GaussianFilter(std::span<const double> inputs, std::size_t n, std::size_t in_dim, double delta)
    : n_(n), delta_(delta) {
  if (n == 0) throw Error(Errc::EmptyDataset, "GaussianFilter: no samples");
  if (!(delta > 0.0)) throw Error(Errc::ConfigError, "GaussianFilter: delta must be positive");
  if (inputs.size() != n * in_dim) throw Error(Errc::DimensionMismatch, "GaussianFilter: inputs size mismatch");
  weights_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = inputs.data() + i * in_dim;
    double norm = 0.0;
    double* row = weights_.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* xj = inputs.data() + j * in_dim;
      double d2 = 0.0;
      for (std::size_t d = 0; d < in_dim; ++d) {
        const double diff = xi[d] - xj[d];
        d2 += diff * diff;
      }
      row[j] = std::exp(-d2 / (2.0 * delta));
      norm += row[j];
    }
    for (std::size_t j = 0; j < n; ++j) row[j] /= norm;
  }
}

std::vector<double> GaussianFilter::lowpass(std::span<const double> values, std::size_t dim) const {
  if (values.size() != n_ * dim) throw Error(Errc::DimensionMismatch, "lowpass: values size mismatch");
  std::vector<double> low(n_ * dim, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* row = weights_.data() + i * n_;
    double* out = low.data() + i * dim;
    for (std::size_t j = 0; j < n_; ++j) {
      const double wij = row[j];
      const double* vj = values.data() + j * dim;
      for (std::size_t d = 0; d < dim; ++d) out[d] += wij * vj[d];
    }
  }
  return low;
}

std::vector<double> gaussian_lowpass(std::span<const double> inputs, std::size_t n, std::size_t in_dim,
                                     std::span<const double> labels, std::size_t out_dim, double delta) {
  return GaussianFilter(inputs, n, in_dim, delta).lowpass(labels, out_dim);
}

FilterErrors filter_errors(const GaussianFilter& filter, std::span<const double> labels,
                           std::span<const double> outputs, std::size_t out_dim) {
  if (labels.size() != outputs.size()) throw Error(Errc::DimensionMismatch, "filter_errors: size mismatch");
  const std::vector<double> y_low = filter.lowpass(labels, out_dim);
  const std::vector<double> h_low = filter.lowpass(outputs, out_dim);

  double num_low = 0.0, den_low = 0.0, num_high = 0.0, den_high = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double yl = y_low[i];
    const double hl = h_low[i];
    const double yh = labels[i] - yl;
    const double hh = outputs[i] - hl;
    num_low += (yl - hl) * (yl - hl);
    den_low += yl * yl;
    num_high += (yh - hh) * (yh - hh);
    den_high += yh * yh;
  }
  if (den_low == 0.0 || den_high == 0.0)
    throw Error(Errc::DegenerateDenominator, "filter_errors: a label part has zero norm");
  return {std::sqrt(num_low / den_low), std::sqrt(num_high / den_high)};
}

FilterErrors filter_errors(std::span<const double> labels, std::span<const double> outputs,
                           std::span<const double> inputs, std::size_t n, std::size_t in_dim, std::size_t out_dim,
                           double delta) {
  return filter_errors(GaussianFilter(inputs, n, in_dim, delta), labels, outputs, out_dim);
}

}  // namespace freqlab::spectrum
