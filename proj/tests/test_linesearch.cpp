#include <cmath>

#include "doctest.h"
#include "freqlab/linesearch.hpp"
#include "freqlab/rng.hpp"

using namespace freqlab;
using namespace freqlab::linesearch;

namespace {

Objective scalar_objective(std::function<double(double)> f) {
  return Objective(1, [f = std::move(f)](std::span<const double> x) { return f(x[0]); });
}

}  // namespace

TEST_CASE("cubicmin recovers an embedded quadratic") {
  // data from (x-1)^2 at a=0, b=2, r=3 with fpa=-2
  const auto m = cubicmin(0.0, 1.0, -2.0, 2.0, 1.0, 3.0, 4.0);
  REQUIRE(m.has_value());
  CHECK(*m == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cubicmin returns nothing for collinear data") {
  // f(x) = 2x + 1
  CHECK_FALSE(cubicmin(0.0, 1.0, 2.0, 1.0, 3.0, 2.0, 5.0).has_value());
}

TEST_CASE("cubicmin is exact on a true cubic") {
  // f(x) = x^3 - 3x^2 + 1: f(1) = -1, f'(1) = -3, f(3) = 1, f(0) = 1; local min at 2
  const auto m = cubicmin(1.0, -1.0, -3.0, 3.0, 1.0, 0.0, 1.0);
  REQUIRE(m.has_value());
  CHECK(*m == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("quadmin on exact quadratics and concave data") {
  const auto a = quadmin(0.0, 1.0, -2.0, 2.0, 1.0);  // x^2 - 2x + 1
  REQUIRE(a.has_value());
  CHECK(*a == doctest::Approx(1.0).epsilon(1e-12));
  const auto b = quadmin(0.0, 0.0, 0.0, 1.0, 1.0);  // x^2
  REQUIRE(b.has_value());
  CHECK(*b == doctest::Approx(0.0));
  CHECK_FALSE(quadmin(0.0, 0.0, 1.0, 1.0, 0.0).has_value());  // negative curvature
}

TEST_CASE("next_alpha interpolation cascade") {
  // iteration 0 skips the cubic and lands on the quadratic minimizer
  {
    // phi = (a-1)^2 over bracket [0, 4]
    const BracketValues v{1.0, -2.0, 9.0, 0.0};
    CHECK(next_alpha(0.0, 4.0, 0.0, v, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // degenerate values force bisection
  {
    const BracketValues v{1.0, 1.0, 2.0, 1.5};  // positive slope at the low end
    CHECK(next_alpha(0.0, 4.0, 2.0, v, 1) == doctest::Approx(2.0));
  }
  // iteration 1 fits the cubic through exact quadratic data
  {
    // phi = (a-1)^2, r = 2 with phi(2) = 1
    const BracketValues v{1.0, -2.0, 9.0, 1.0};
    CHECK(next_alpha(0.0, 4.0, 2.0, v, 1) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("next_alpha stays strictly inside the bracket") {
  Rng rng(77);
  for (int t = 0; t < 400; ++t) {
    const double lo = rng.uniform(-2.0, 2.0);
    const double hi = lo + rng.uniform(0.1, 4.0);
    // randomly swap the roles of the ends
    const bool swap = rng.uniform() < 0.5;
    const double amin = swap ? hi : lo, amax = swap ? lo : hi;
    const BracketValues v{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    const double a = next_alpha(amin, amax, rng.uniform(lo, hi), v, t % 3);
    CHECK(a > lo);
    CHECK(a < hi);
  }
}

TEST_CASE("wolfe_search accepts a strong Wolfe point on (alpha-2)^2") {
  auto obj = scalar_objective([](double a) { return (a - 2.0) * (a - 2.0); });
  const ParamVector theta{0.0}, d{1.0};
  const auto out = wolfe_search(obj, theta, d);
  REQUIRE(out.status == LsStatus::Accepted);
  const double phi_a = (out.alpha - 2.0) * (out.alpha - 2.0);
  const double dphi_a = 2.0 * (out.alpha - 2.0);
  CHECK(phi_a <= 4.0 - 1.6e-3 * out.alpha);
  CHECK(std::fabs(dphi_a) <= 3.6);
  CHECK(out.phi_evals > 0);
}

TEST_CASE("wolfe_search flags ascent directions") {
  auto obj = scalar_objective([](double a) { return (a - 2.0) * (a - 2.0); });
  const ParamVector theta{3.0}, d{1.0};  // walking uphill from x=3
  const auto out = wolfe_search(obj, theta, d);
  CHECK(out.status == LsStatus::NonDescentDirection);
}

TEST_CASE("wolfe_search fails when the curvature condition is unreachable") {
  auto obj = scalar_objective([](double a) { return -a; });
  const ParamVector theta{0.0}, d{1.0};
  const auto out = wolfe_search(obj, theta, d);
  CHECK(out.status == LsStatus::Failed);
}

TEST_CASE("randomized smooth objectives: accepted steps re-verify against analytic slopes") {
  Rng rng(123);
  const WolfeConfig cfg;
  int accepted = 0;
  for (int t = 0; t < 100; ++t) {
    const double a = 0.2 + 2.0 * rng.uniform();
    const double b = -0.5 - 2.0 * rng.uniform();
    const double c = 0.4 * rng.uniform();
    const double w = 1.0 + 3.0 * rng.uniform();
    // f(x) = a x^2 + b x + c sin(w x) + 6; f'(0) = b + c w may still be
    // non-negative for unlucky draws, so guard on descent
    auto f = [=](double x) { return a * x * x + b * x + c * std::sin(w * x) + 6.0; };
    auto df = [=](double x) { return 2.0 * a * x + b + c * w * std::cos(w * x); };
    if (!(df(0.0) < 0.0)) continue;
    auto obj = scalar_objective(f);
    const ParamVector theta{0.0}, d{1.0};
    const auto out = wolfe_search(obj, theta, d, cfg);
    if (out.status != LsStatus::Accepted) continue;
    ++accepted;
    // independent evaluations of both inequalities (tolerances cover the
    // forward-difference slope inside the search)
    CHECK(f(out.alpha) <= f(0.0) + cfg.rho * out.alpha * df(0.0) + 1e-10);
    CHECK(std::fabs(df(out.alpha)) <= -cfg.sigma * df(0.0) + 1e-6);
  }
  // the family is benign; nearly all searches should accept
  CHECK(accepted >= 90);
}

TEST_CASE("golden_section basics") {
  const auto sq = [](double x) { return (x - 0.5) * (x - 0.5); };
  CHECK(golden_section(sq, 0.0, 1.0, 1e-6) == doctest::Approx(0.5).epsilon(1e-6));
  const auto lin = [](double x) { return x; };
  CHECK(std::fabs(golden_section(lin, 0.0, 1.0, 1e-6)) < 2e-6);
}

TEST_CASE("golden_section on cos(3x) against a dense-grid oracle") {
  const auto f = [](double x) { return std::cos(3.0 * x); };
  double best_x = 0.0, best = f(0.0);
  for (int i = 0; i <= 100000; ++i) {
    const double x = i / 100000.0;
    if (f(x) < best) {
      best = f(x);
      best_x = x;
    }
  }
  CHECK(best_x == doctest::Approx(1.0).epsilon(1e-4));  // cos decreasing on [0, 3] rad
  CHECK(golden_section(f, 0.0, 1.0, 1e-6) == doctest::Approx(best_x).epsilon(2e-6));
}

TEST_CASE("golden_section evaluation count respects the contraction bound") {
  int evals = 0;
  const auto f = [&](double x) {
    ++evals;
    return (x - 0.3) * (x - 0.3);
  };
  const double tol = 1e-6;
  golden_section(f, 0.0, 1.0, tol);
  const int iter_bound = static_cast<int>(std::ceil(std::log(tol) / std::log(0.6180339887))) + 2;
  CHECK(evals <= iter_bound + 2);  // one evaluation per contraction plus the two seeds
}
