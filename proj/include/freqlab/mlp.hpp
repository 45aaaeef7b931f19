#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "freqlab/common.hpp"
#include "freqlab/objective.hpp"

namespace freqlab::mlp {

// Fully-connected network shape m_0, m_1, ..., m_H. Hidden layers use the
// logistic sigmoid; the output layer is linear so unbounded targets can be
// regressed.
struct MlpSpec {
  std::vector<int> widths;
};

void validate(const MlpSpec& spec);

// P = sum_l (m_l + 1) * m_{l+1}
std::size_t param_count(const MlpSpec& spec);

// Structured view of the parameters. weights[l] is (m_{l+1} x m_l) row-major.
struct MlpParams {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

// Packing order is fixed: layers in order, each layer's weight matrix
// row-major followed by its bias vector. pack and unpack are exact inverses.
ParamVector pack(const MlpSpec& spec, const MlpParams& params);
MlpParams unpack(const MlpSpec& spec, std::span<const double> theta);

// Every weight and bias entry is drawn i.i.d. from N(0, 2/(m_{l+1} + m_l)),
// in packing order, from the seeded generator in rng.hpp.
ParamVector init_params(const MlpSpec& spec, std::uint64_t seed);

std::vector<double> forward(const MlpSpec& spec, std::span<const double> theta, std::span<const double> x);

struct Dataset {
  std::size_t n = 0;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> inputs;   // n * in_dim, sample-major
  std::vector<double> targets;  // n * out_dim, sample-major

  std::span<const double> input(std::size_t i) const { return {inputs.data() + i * in_dim, in_dim}; }
  std::span<const double> target(std::size_t i) const { return {targets.data() + i * out_dim, out_dim}; }
};

void validate(const MlpSpec& spec, const Dataset& data);

// Mean over samples and output components of the squared error.
double mse_loss(const MlpSpec& spec, std::span<const double> theta, const Dataset& data);

// Network outputs for every sample, written sample-major into `out`
// (data.n * out_dim values).
void batch_outputs(const MlpSpec& spec, std::span<const double> theta, const Dataset& data, std::span<double> out);

// Wraps the MSE loss into the black-box objective the optimizers consume.
// Evaluations are thread-safe and bit-identical to mse_loss; repeated
// evaluations near a cached parameter vector reuse unchanged layer
// activations, which makes the P+1 evaluations of fd_gradient cheap.
Objective make_mse_objective(const MlpSpec& spec, Dataset data);

}  // namespace freqlab::mlp
