#pragma once

#include <functional>
#include <optional>
#include <span>

#include "freqlab/objective.hpp"

namespace freqlab::linesearch {

struct WolfeConfig {
  double rho = 1e-4;       // sufficient-decrease constant
  double sigma = 0.9;      // curvature constant
  double alpha_max = 50.0;
  int maxiter = 10;
};

enum class LsStatus { Accepted, Failed, NonDescentDirection };

struct LineSearchOutcome {
  LsStatus status = LsStatus::Failed;
  double alpha = 0.0;
  int phi_evals = 0;
  double phi_alpha = 0.0;  // loss at the accepted step
};

// Minimizer of the cubic through (a,fa), (b,fb), (r,fr) with derivative fpa
// at a. Empty when the fit has no positive-curvature stationary point or is
// numerically degenerate (collinear data, repeated abscissae).
std::optional<double> cubicmin(double a, double fa, double fpa, double b, double fb, double r, double fr);

// Minimizer of the quadratic through (a,fa), (b,fb) with derivative fpa at a.
// Empty when the curvature is not positive.
std::optional<double> quadmin(double a, double fa, double fpa, double b, double fb);

struct BracketValues {
  double phi_min;   // phi(alpha_min)
  double dphi_min;  // phi'(alpha_min)
  double phi_max;   // phi(alpha_max)
  double phi_r;     // phi(alpha_r)
};

// Next trial step inside the bracket: cubic interpolation after the first
// iteration, quadratic when the cubic is missing or within 0.2*width of an
// end, bisection when the quadratic is missing or within 0.1*width of an end.
double next_alpha(double alpha_min, double alpha_max, double alpha_r, const BracketValues& v, int iter_index);

// Strong Wolfe search along direction d. phi'(alpha) is obtained by the
// forward-difference scheme applied to the scalar function phi. An accepted
// step satisfies both inequalities
//   phi(alpha) <= phi(0) + rho*alpha*phi'(0),  |phi'(alpha)| <= -sigma*phi'(0).
LineSearchOutcome wolfe_search(const Objective& obj, std::span<const double> theta, std::span<const double> d,
                               const WolfeConfig& cfg = {}, const FdConfig& fd = {});

// Golden-section minimization on [lo, hi]; returns the interval midpoint once
// the bracket is narrower than tol.
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol);

}  // namespace freqlab::linesearch
