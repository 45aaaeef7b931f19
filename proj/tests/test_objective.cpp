#include <bit>
#include <cmath>

#include "doctest.h"
#include "freqlab/mlp.hpp"
#include "freqlab/objective.hpp"
#include "freqlab/rng.hpp"
#include "freqlab/threads.hpp"
#include "freqlab/vec.hpp"

using namespace freqlab;

namespace {

Objective sum_of_squares(std::size_t n) {
  return Objective(n, [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  });
}

// independent central-difference oracle
ParamVector central_diff(const std::function<double(std::span<const double>)>& f, const ParamVector& theta,
                         double h) {
  ParamVector g(theta.size());
  ParamVector x = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double old = x[i];
    x[i] = old + h;
    const double fp = f(x);
    x[i] = old - h;
    const double fm = f(x);
    x[i] = old;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("fd_gradient of a constant objective is zero") {
  Objective obj(3, [](std::span<const double>) { return 4.25; });
  const ParamVector g = fd_gradient(obj, ParamVector{1.0, -2.0, 0.5});
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("fd_gradient of sum of squares carries the exact forward-difference bias") {
  // (L(t+z) - L(t))/z = 2 t + z exactly for a quadratic with unit coefficient;
  // a coarse step keeps the bias far above the rounding floor of the quotient
  FdConfig coarse;
  coarse.zeta = 1e-4;
  auto obj = sum_of_squares(2);
  const ParamVector gc = fd_gradient(obj, ParamVector{3.0, -1.0}, coarse);
  CHECK(gc[0] == doctest::Approx(6.0 + coarse.zeta).epsilon(1e-10));
  CHECK(gc[1] == doctest::Approx(-2.0 + coarse.zeta).epsilon(1e-10));

  const ParamVector g = fd_gradient(obj, ParamVector{3.0, -1.0}, FdConfig{});
  CHECK(std::fabs(g[0] - 6.0) < 1e-6);
  CHECK(std::fabs(g[1] + 2.0) < 1e-6);
}

TEST_CASE("fd_gradient consumes exactly dim+1 evaluations") {
  auto obj = sum_of_squares(17);
  ParamVector theta(17, 0.3);
  fd_gradient(obj, theta);
  CHECK(obj.eval_count() == 18);
  CHECK(obj.gradient_count() == 1);
  fd_gradient(obj, theta);
  CHECK(obj.eval_count() == 36);
  CHECK(obj.gradient_count() == 2);
}

TEST_CASE("fd_gradient of an MLP loss matches a central-difference oracle") {
  const mlp::MlpSpec spec{{1, 5, 1}};
  mlp::Dataset data;
  data.n = 16;
  data.in_dim = data.out_dim = 1;
  Rng rng(42);
  for (std::size_t i = 0; i < data.n; ++i) {
    data.inputs.push_back(rng.uniform(-3.0, 3.0));
    data.targets.push_back(std::sin(data.inputs.back()));
  }
  const ParamVector theta = mlp::init_params(spec, 7);
  const Objective obj = mlp::make_mse_objective(spec, data);
  const ParamVector g = fd_gradient(obj, theta);
  const auto plain = [&](std::span<const double> t) { return mlp::mse_loss(spec, t, data); };
  const ParamVector oracle = central_diff(plain, theta, 1e-5);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double scale = std::max(1e-4, std::fabs(oracle[i]));
    CHECK(std::fabs(g[i] - oracle[i]) / scale < 1e-4);
  }
}

TEST_CASE("fd_gradient rejects non-finite losses") {
  Objective obj(1, [](std::span<const double> x) { return x[0] > 0.5 ? std::nan("") : 0.0; });
  CHECK_THROWS_AS((void)fd_gradient(obj, ParamVector{1.0}), Error);
}

TEST_CASE("fd_hessvec returns zero for v = 0 without evaluating") {
  auto obj = sum_of_squares(4);
  const ParamVector hv = fd_hessvec(obj, ParamVector(4, 1.0), ParamVector(4, 0.0));
  CHECK(obj.eval_count() == 0);
  for (double v : hv) CHECK(v == 0.0);
}

TEST_CASE("fd_hessvec on the identity Hessian reproduces v") {
  Objective obj(3, [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += 0.5 * v * v;
    return s;
  });
  const ParamVector hv = fd_hessvec(obj, ParamVector{0.2, -0.1, 0.4}, ParamVector{1.0, 0.0, 0.0});
  CHECK(std::fabs(hv[0] - 1.0) < 1e-4);
  CHECK(std::fabs(hv[1]) < 1e-4);
  CHECK(std::fabs(hv[2]) < 1e-4);
}

TEST_CASE("fd_hessvec matches the analytic product on diag(1,10)") {
  Objective obj(2, [](std::span<const double> x) { return 0.5 * (x[0] * x[0] + 10.0 * x[1] * x[1]); });
  const ParamVector hv = fd_hessvec(obj, ParamVector{0.0, 0.0}, ParamVector{1.0, 1.0});
  CHECK(std::fabs(hv[0] - 1.0) < 1e-3);
  CHECK(std::fabs(hv[1] - 10.0) / 10.0 < 1e-3);
}

TEST_CASE("objective purity: repeated evaluation is bit-identical across cache states") {
  const mlp::MlpSpec spec{{2, 7, 3}};
  mlp::Dataset data;
  data.n = 11;
  data.in_dim = 2;
  data.out_dim = 3;
  Rng rng(3);
  for (std::size_t i = 0; i < data.n * 2; ++i) data.inputs.push_back(rng.normal());
  for (std::size_t i = 0; i < data.n * 3; ++i) data.targets.push_back(rng.normal());
  const Objective obj = mlp::make_mse_objective(spec, data);

  const ParamVector theta = mlp::init_params(spec, 9);
  const double first = obj.eval(theta);

  // wander the cache through random single- and multi-coordinate edits
  ParamVector probe = theta;
  for (int t = 0; t < 200; ++t) {
    const std::size_t i = static_cast<std::size_t>(rng.below(probe.size()));
    probe[i] += rng.normal(0.0, 0.05);
    (void)obj.eval(probe);
    if (t % 17 == 0) {
      for (double& v : probe) v += rng.normal(0.0, 0.01);
      (void)obj.eval(probe);
    }
    const double again = obj.eval(theta);
    REQUIRE(std::bit_cast<std::uint64_t>(again) == std::bit_cast<std::uint64_t>(first));
  }
}

TEST_CASE("cached objective agrees bit for bit with the plain loss") {
  const mlp::MlpSpec spec{{1, 6, 4, 1}};
  mlp::Dataset data;
  data.n = 9;
  data.in_dim = data.out_dim = 1;
  Rng rng(5);
  for (std::size_t i = 0; i < data.n; ++i) {
    data.inputs.push_back(rng.normal());
    data.targets.push_back(rng.normal());
  }
  const Objective obj = mlp::make_mse_objective(spec, data);
  ParamVector theta = mlp::init_params(spec, 1);
  for (int t = 0; t < 300; ++t) {
    const double cached = obj.eval(theta);
    const double plain = mlp::mse_loss(spec, theta, data);
    REQUIRE(std::bit_cast<std::uint64_t>(cached) == std::bit_cast<std::uint64_t>(plain));
    theta[static_cast<std::size_t>(rng.below(theta.size()))] += rng.normal(0.0, 0.1);
  }
}

TEST_CASE("parallel fd_gradient equals the sequential result bit for bit") {
  const mlp::MlpSpec spec{{1, 8, 1}};
  mlp::Dataset data;
  data.n = 20;
  data.in_dim = data.out_dim = 1;
  Rng rng(8);
  for (std::size_t i = 0; i < data.n; ++i) {
    data.inputs.push_back(rng.uniform(-3.0, 3.0));
    data.targets.push_back(std::sin(data.inputs.back()));
  }
  const ParamVector theta = mlp::init_params(spec, 2);

  set_thread_count(1);
  const Objective obj1 = mlp::make_mse_objective(spec, data);
  const ParamVector g1 = fd_gradient(obj1, theta);
  set_thread_count(4);
  const Objective obj2 = mlp::make_mse_objective(spec, data);
  const ParamVector g2 = fd_gradient(obj2, theta);
  set_thread_count(0);

  REQUIRE(g1.size() == g2.size());
  for (std::size_t i = 0; i < g1.size(); ++i)
    REQUIRE(std::bit_cast<std::uint64_t>(g1[i]) == std::bit_cast<std::uint64_t>(g2[i]));
}
