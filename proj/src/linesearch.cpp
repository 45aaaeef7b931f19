#include "freqlab/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "freqlab/vec.hpp"

namespace freqlab::linesearch {

std::optional<double> cubicmin(double a, double fa, double fpa, double b, double fb, double r, double fr) {
  const double db = b - a;
  const double dr = r - a;
  if (db == 0.0 || dr == 0.0 || db == dr) return std::nullopt;
  const double det = db * db * dr * dr * (db - dr);
  const double t1 = fb - fa - fpa * db;
  const double t2 = fr - fa - fpa * dr;
  const double ca = (t1 * dr * dr - t2 * db * db) / det;
  const double cb = (-t1 * dr * dr * dr + t2 * db * db * db) / det;
  const double radical = cb * cb - 3.0 * ca * fpa;
  if (!(radical >= 0.0)) return std::nullopt;
  // the +sqrt root has f'' = 2*sqrt(radical) >= 0 regardless of ca's sign
  const double xmin = a + (-cb + std::sqrt(radical)) / (3.0 * ca);
  if (!std::isfinite(xmin)) return std::nullopt;
  return xmin;
}

std::optional<double> quadmin(double a, double fa, double fpa, double b, double fb) {
  const double db = b - a;
  if (db == 0.0) return std::nullopt;
  const double curv = (fb - fa - fpa * db) / (db * db);
  if (!(curv > 0.0) || !std::isfinite(curv)) return std::nullopt;
  const double xmin = a - fpa / (2.0 * curv);
  if (!std::isfinite(xmin)) return std::nullopt;
  return xmin;
}

double next_alpha(double alpha_min, double alpha_max, double alpha_r, const BracketValues& v, int iter_index) {
  const double lo = std::min(alpha_min, alpha_max);
  const double hi = std::max(alpha_min, alpha_max);
  const double width = hi - lo;
  if (iter_index > 0) {
    const double cchk = 0.2 * width;
    const auto c = cubicmin(alpha_min, v.phi_min, v.dphi_min, alpha_max, v.phi_max, alpha_r, v.phi_r);
    if (c && *c >= lo + cchk && *c <= hi - cchk) return *c;
  }
  const double qchk = 0.1 * width;
  const auto q = quadmin(alpha_min, v.phi_min, v.dphi_min, alpha_max, v.phi_max);
  if (q && *q >= lo + qchk && *q <= hi - qchk) return *q;
  return 0.5 * (alpha_min + alpha_max);
}

namespace {

// phi evaluations within one search are memoized on the exact step value, so
// bracket bookkeeping never re-spends loss evaluations.
class Phi {
 public:
  Phi(const Objective& obj, std::span<const double> theta, std::span<const double> d)
      : obj_(obj), theta_(theta), d_(d), scratch_(theta.begin(), theta.end()) {}

  double operator()(double alpha) {
    for (const auto& [a, f] : memo_)
      if (a == alpha) return f;
    std::copy(theta_.begin(), theta_.end(), scratch_.begin());
    axpy(alpha, d_, scratch_);
    const double f = obj_.eval(scratch_);
    memo_.emplace_back(alpha, f);
    ++evals_;
    return f;
  }

  double slope(double alpha, double zeta) { return ((*this)(alpha + zeta) - (*this)(alpha)) / zeta; }

  int evals() const { return evals_; }

 private:
  const Objective& obj_;
  std::span<const double> theta_;
  std::span<const double> d_;
  ParamVector scratch_;
  std::vector<std::pair<double, double>> memo_;
  int evals_ = 0;
};

}  // namespace

LineSearchOutcome wolfe_search(const Objective& obj, std::span<const double> theta, std::span<const double> d,
                               const WolfeConfig& cfg, const FdConfig& fd) {
  Phi phi(obj, theta, d);
  LineSearchOutcome out;

  const double phi0 = phi(0.0);
  const double dphi0 = phi.slope(0.0, fd.zeta);
  if (!(dphi0 < 0.0)) {
    out.status = LsStatus::NonDescentDirection;
    out.phi_evals = phi.evals();
    return out;
  }

  // first trial: step interpolated from phi(1), clamped to 1
  double alpha = 1.0;
  {
    const double interp = 1.01 * 2.0 * (phi(1.0) - phi0) / dphi0;
    if (std::isfinite(interp) && interp > 0.0) alpha = std::min(1.0, interp);
  }

  double a_min = 0.0, a_max = cfg.alpha_max, a_r = 0.0;

  for (int i = 0; i <= cfg.maxiter; ++i) {
    const double phi_a = phi(alpha);
    const double dphi_a = phi.slope(alpha, fd.zeta);
    const bool armijo = phi_a <= phi0 + cfg.rho * alpha * dphi0;
    const bool curvature = std::fabs(dphi_a) <= -cfg.sigma * dphi0;
    if (armijo && curvature) {
      out.status = LsStatus::Accepted;
      out.alpha = alpha;
      out.phi_alpha = phi_a;
      out.phi_evals = phi.evals();
      return out;
    }
    if (i == cfg.maxiter) break;

    if (!armijo || !(phi_a < phi(a_min))) {
      a_r = a_max;
      a_max = alpha;
    } else if (dphi_a * (a_max - a_min) >= 0.0) {
      a_r = a_max;
      a_max = a_min;
      a_min = alpha;
    } else {
      a_r = a_min;
      a_min = alpha;
    }
    const BracketValues v{phi(a_min), phi.slope(a_min, fd.zeta), phi(a_max), phi(a_r)};
    alpha = next_alpha(a_min, a_max, a_r, v, i);
  }

  out.status = LsStatus::Failed;
  out.phi_evals = phi.evals();
  return out;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  static const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace freqlab::linesearch
