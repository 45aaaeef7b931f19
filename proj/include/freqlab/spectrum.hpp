#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "freqlab/common.hpp"

namespace freqlab::spectrum {

// 1/n-normalized DFT coefficients of a real sequence.
struct SpectrumView {
  std::vector<std::complex<double>> coef;
  std::size_t size() const { return coef.size(); }
  double modulus(std::size_t k) const { return std::abs(coef[k]); }
};

// Direct-summation DFT, f_k = (1/n) sum_j f_j exp(-i 2 pi j k / n).
SpectrumView dft(std::span<const double> samples);

// |output_k - target_k| / |target_k|. Throws ZeroTargetFrequency when the
// target modulus at k vanishes; callers exclude such k from the tracked set.
double relative_spectral_error(const SpectrumView& target, const SpectrumView& output, std::size_t k);

// All k in 0..n/2 whose modulus reaches threshold_ratio times the peak.
std::vector<std::size_t> select_peak_frequencies(const SpectrumView& target, double threshold_ratio = 0.1);

// Row-normalized Gaussian kernel over the sample cloud,
// w_ij = G(x_i - x_j) / C_i with G(u) = exp(-|u|^2 / (2 delta)).
// Precomputed once so repeated low-pass applications during a training run
// cost one n x n product.
class GaussianFilter {
 public:
  GaussianFilter(std::span<const double> inputs, std::size_t n, std::size_t in_dim, double delta);

  // values: n x dim sample-major; returns the per-sample low-frequency part.
  std::vector<double> lowpass(std::span<const double> values, std::size_t dim) const;

  double delta() const { return delta_; }
  std::size_t samples() const { return n_; }

 private:
  std::size_t n_;
  double delta_;
  std::vector<double> weights_;  // n x n, rows sum to 1
};

// One-shot convenience over GaussianFilter.
std::vector<double> gaussian_lowpass(std::span<const double> inputs, std::size_t n, std::size_t in_dim,
                                     std::span<const double> labels, std::size_t out_dim, double delta);

struct FilterErrors {
  double e_low = 0.0;
  double e_high = 0.0;
};

// Relative L2 errors of the low/high decompositions of outputs against
// labels, both split with the same filter. Throws DegenerateDenominator when
// either label part has zero norm.
FilterErrors filter_errors(const GaussianFilter& filter, std::span<const double> labels,
                           std::span<const double> outputs, std::size_t out_dim);

FilterErrors filter_errors(std::span<const double> labels, std::span<const double> outputs,
                           std::span<const double> inputs, std::size_t n, std::size_t in_dim, std::size_t out_dim,
                           double delta);

}  // namespace freqlab::spectrum
