#include <bit>
#include <cmath>

#include "doctest.h"
#include "freqlab/mlp.hpp"
#include "freqlab/rng.hpp"

using namespace freqlab;

namespace {

// per-neuron forward oracle, coded independently of the batch kernel
std::vector<double> naive_forward(const mlp::MlpSpec& spec, const mlp::MlpParams& p, std::vector<double> a) {
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const auto out = static_cast<std::size_t>(spec.widths[l + 1]);
    const auto in = static_cast<std::size_t>(spec.widths[l]);
    std::vector<double> z(out);
    for (std::size_t r = 0; r < out; ++r) {
      double s = p.biases[l][r];
      for (std::size_t c = 0; c < in; ++c) s += p.weights[l][r * in + c] * a[c];
      z[r] = (l + 1 < p.weights.size()) ? 1.0 / (1.0 + std::exp(-s)) : s;
    }
    a = std::move(z);
  }
  return a;
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(mlp::param_count({{1, 100, 10, 1}}) == 1221);
  CHECK(mlp::param_count({{1, 1}}) == 2);
  CHECK(mlp::param_count({{1, 500, 50, 1}}) == 26101);
  CHECK(mlp::init_params({{1, 100, 10, 1}}, 3).size() == 1221);
}

TEST_CASE("init_params samples the stated variance") {
  const mlp::MlpSpec spec{{1, 500, 50, 1}};
  const ParamVector theta = mlp::init_params(spec, 12345);
  // first layer holds 500 weights drawn from N(0, 2/501)
  const double expected_var = 2.0 / 501.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < 500; ++i) mean += theta[i];
  mean /= 500.0;
  double var = 0.0;
  for (std::size_t i = 0; i < 500; ++i) var += (theta[i] - mean) * (theta[i] - mean);
  var /= 499.0;
  // sample variance of n normals has stddev sigma^2 * sqrt(2/(n-1))
  const double se = expected_var * std::sqrt(2.0 / 499.0);
  CHECK(std::fabs(var - expected_var) < 3.0 * se);
}

TEST_CASE("init_params is deterministic per seed") {
  const mlp::MlpSpec spec{{2, 8, 3}};
  const ParamVector a = mlp::init_params(spec, 99);
  const ParamVector b = mlp::init_params(spec, 99);
  const ParamVector c = mlp::init_params(spec, 100);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("forward with all-zero parameters returns zero") {
  const mlp::MlpSpec spec{{1, 4, 2}};
  const ParamVector theta(mlp::param_count(spec), 0.0);
  const auto out = mlp::forward(spec, theta, std::vector<double>{1.7});
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("forward 1-1-1 with unit weights at x=0 gives sigmoid(0) through the linear head") {
  const mlp::MlpSpec spec{{1, 1, 1}};
  // packing order: W0, b0, W1, b1
  const ParamVector theta{1.0, 0.0, 1.0, 0.0};
  const auto out = mlp::forward(spec, theta, std::vector<double>{0.0});
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("forward matches an independent per-neuron oracle") {
  Rng rng(21);
  const mlp::MlpSpec spec{{3, 9, 5, 2}};
  const ParamVector theta = mlp::init_params(spec, 4);
  const auto params = mlp::unpack(spec, theta);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> x{rng.normal(), rng.normal(), rng.normal()};
    const auto got = mlp::forward(spec, theta, x);
    const auto want = naive_forward(spec, params, x);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::fabs(got[i] - want[i]) < 1e-12);
  }
}

TEST_CASE("mse_loss basics") {
  const mlp::MlpSpec spec{{1, 1}};
  mlp::Dataset data;
  data.n = 1;
  data.in_dim = data.out_dim = 1;
  data.inputs = {0.0};
  data.targets = {0.0};
  // w=0, b=1: prediction 1 against target 0
  CHECK(mlp::mse_loss(spec, ParamVector{0.0, 1.0}, data) == doctest::Approx(1.0));
  // exact fit has zero loss
  CHECK(mlp::mse_loss(spec, ParamVector{0.0, 0.0}, data) == 0.0);

  mlp::Dataset two;
  two.n = 2;
  two.in_dim = two.out_dim = 1;
  two.inputs = {0.0, 1.0};
  two.targets = {0.0, 0.0};
  // w=2, b=0: predictions (0, 2), mean of 0 and 4
  CHECK(mlp::mse_loss(spec, ParamVector{2.0, 0.0}, two) == doctest::Approx(2.0));
  two.n = 0;
  two.inputs.clear();
  two.targets.clear();
  CHECK_THROWS_AS((void)mlp::mse_loss(spec, ParamVector{2.0, 0.0}, two), Error);
}

TEST_CASE("pack and unpack are exact inverses") {
  const mlp::MlpSpec spec{{2, 5, 3}};
  Rng rng(17);
  ParamVector theta(mlp::param_count(spec));
  for (double& v : theta) v = rng.normal();
  const auto params = mlp::unpack(spec, theta);
  const ParamVector back = mlp::pack(spec, params);
  REQUIRE(back.size() == theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    CHECK(std::bit_cast<std::uint64_t>(back[i]) == std::bit_cast<std::uint64_t>(theta[i]));
}

TEST_CASE("single-layer packing order is weights then bias") {
  const mlp::MlpSpec spec{{1, 1}};
  mlp::MlpParams p;
  p.weights = {{3.0}};
  p.biases = {{4.0}};
  const ParamVector theta = mlp::pack(spec, p);
  CHECK(theta == ParamVector{3.0, 4.0});
}

TEST_CASE("unpack rejects a wrong-length vector") {
  const mlp::MlpSpec spec{{1, 1}};
  CHECK_THROWS_AS((void)mlp::unpack(spec, ParamVector{1.0, 2.0, 3.0}), Error);
}

TEST_CASE("mse_loss is zero iff predictions equal targets") {
  const mlp::MlpSpec spec{{1, 3, 1}};
  const ParamVector theta = mlp::init_params(spec, 31);
  mlp::Dataset data;
  data.n = 5;
  data.in_dim = data.out_dim = 1;
  data.inputs = {-2.0, -1.0, 0.0, 1.0, 2.0};
  data.targets.resize(5);
  for (std::size_t i = 0; i < 5; ++i)
    data.targets[i] = mlp::forward(spec, theta, std::vector<double>{data.inputs[i]})[0];
  const double loss = mlp::mse_loss(spec, theta, data);
  CHECK(loss >= 0.0);
  CHECK(loss < 1e-25);
  data.targets[2] += 0.5;
  CHECK(mlp::mse_loss(spec, theta, data) > 0.0);
}
