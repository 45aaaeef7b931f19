#include "freqlab/verify.hpp"

#include <cmath>
#include <sstream>

#include "freqlab/linesearch.hpp"
#include "freqlab/optimizers.hpp"
#include "freqlab/rng.hpp"
#include "freqlab/spectrum.hpp"
#include "freqlab/vec.hpp"

namespace freqlab::verify {

namespace {

Objective quadratic(std::vector<double> diag) {
  const std::size_t n = diag.size();
  return Objective(n, [d = std::move(diag), n](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += 0.5 * d[i] * x[i] * x[i];
    return s;
  });
}

void add(Report& r, const std::string& name, bool ok, const std::string& detail = "") {
  r.checks.push_back({name, ok, detail});
}

}  // namespace

Report run_battery() {
  Report report;

  {  // forward-difference gradient on a quadratic has the exact +zeta/2*a_ii bias
    const FdConfig fd;
    auto obj = quadratic({2.0, 20.0});
    const ParamVector theta{3.0, -1.0};
    const ParamVector g = fd_gradient(obj, theta, fd);
    const double e0 = std::fabs(g[0] - (2.0 * 3.0 + fd.zeta));
    const double e1 = std::fabs(g[1] - (20.0 * -1.0 + 10.0 * fd.zeta));
    add(report, "fd_gradient quadratic bias", e0 < 1e-6 && e1 < 1e-5);
    add(report, "fd_gradient eval accounting", obj.eval_count() == theta.size() + 1);
  }

  {  // Hessian-vector product against the analytic product
    auto obj = quadratic({1.0, 10.0});
    const ParamVector theta{0.3, -0.2};
    const ParamVector v{1.0, 1.0};
    const ParamVector hv = fd_hessvec(obj, theta, v);
    add(report, "fd_hessvec diag(1,10)",
        std::fabs(hv[0] - 1.0) < 1e-3 && std::fabs(hv[1] - 10.0) / 10.0 < 1e-3);
  }

  {  // strong Wolfe acceptance re-verified with analytic slopes
    Rng rng(7);
    int ok = 0, total = 0;
    const linesearch::WolfeConfig wolfe;
    for (int t = 0; t < 20; ++t) {
      const double a = 0.5 + 2.0 * rng.uniform();
      const double b = -1.0 - rng.uniform();
      const double c = 0.3 * rng.uniform();
      // f(x) = a x^2 + b x + c sin(3x): descent at 0 since f'(0) = b + 3c < 0
      auto f = [=](double x) { return a * x * x + b * x + c * std::sin(3.0 * x) + 10.0; };
      auto df = [=](double x) { return 2.0 * a * x + b + 3.0 * c * std::cos(3.0 * x); };
      Objective obj(1, [f](std::span<const double> x) { return f(x[0]); });
      const ParamVector theta{0.0}, d{1.0};
      const auto out = linesearch::wolfe_search(obj, theta, d, wolfe);
      if (out.status != linesearch::LsStatus::Accepted) continue;
      ++total;
      const bool armijo = f(out.alpha) <= f(0.0) + wolfe.rho * out.alpha * df(0.0) + 1e-12;
      const bool curv = std::fabs(df(out.alpha)) <= -wolfe.sigma * df(0.0) + 1e-6;
      if (armijo && curv) ++ok;
    }
    std::ostringstream os;
    os << ok << "/" << total << " accepted steps satisfy both inequalities";
    add(report, "wolfe_search strong Wolfe re-check", total > 0 && ok == total, os.str());
  }

  {  // interpolators on matching-degree polynomials
    const auto c = linesearch::cubicmin(1.0, -1.0, -3.0, 3.0, 1.0, 0.0, 1.0);  // x^3 - 3x^2 + 1
    const auto q = linesearch::quadmin(0.0, 1.0, -2.0, 2.0, 1.0);              // (x-1)^2
    add(report, "cubicmin exact on cubic", c && std::fabs(*c - 2.0) < 1e-10);
    add(report, "quadmin exact on quadratic", q && std::fabs(*q - 1.0) < 1e-10);
  }

  {  // golden section on a unimodal function
    const double x = linesearch::golden_section([](double t) { return (t - 0.5) * (t - 0.5); }, 0.0, 1.0, 1e-6);
    add(report, "golden_section unimodal", std::fabs(x - 0.5) < 1e-6);
  }

  {  // Parseval and conjugate symmetry
    Rng rng(11);
    bool ok = true;
    for (int t = 0; t < 20 && ok; ++t) {
      std::vector<double> f(64);
      for (double& v : f) v = rng.normal();
      const auto spec = spectrum::dft(f);
      double power = 0.0, time_power = 0.0;
      for (std::size_t k = 0; k < f.size(); ++k) power += std::norm(spec.coef[k]);
      for (double v : f) time_power += v * v;
      if (std::fabs(power - time_power / static_cast<double>(f.size())) > 1e-10) ok = false;
      for (std::size_t k = 1; k < f.size(); ++k)
        if (std::abs(spec.coef[f.size() - k] - std::conj(spec.coef[k])) > 1e-10) ok = false;
    }
    add(report, "dft Parseval and conjugate symmetry", ok);
  }

  {  // filter reconstruction y_low + y_high = y
    Rng rng(13);
    const std::size_t n = 40, dim = 3;
    std::vector<double> inputs(n * 2), labels(n * dim);
    for (double& v : inputs) v = rng.normal();
    for (double& v : labels) v = rng.uniform();
    const auto low = spectrum::gaussian_lowpass(inputs, n, 2, labels, dim, 1.5);
    bool ok = true;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const double high = labels[i] - low[i];
      if (std::fabs(low[i] + high - labels[i]) > 1e-12) ok = false;
    }
    add(report, "filter reconstruction", ok);
  }

  {  // CG and BFGS solve diag(1,10); directions descend
    bool descent_ok = true;
    opt::CgOptions cg_opts;
    cg_opts.direction_observer = [&](int, std::span<const double> d, std::span<const double> g) {
      if (dot(d, g) >= 0.0) descent_ok = false;
    };
    auto cg_obj = quadratic({1.0, 10.0});
    const auto cg = opt::cg_run(cg_obj, {1.0, 1.0}, {1e-6, 10, 20}, cg_opts);
    add(report, "cg_run diag(1,10) quadratic",
        cg.status == opt::TermStatus::GradTol && std::fabs(cg.theta[0]) < 1e-4 && std::fabs(cg.theta[1]) < 1e-4 &&
            descent_ok);

    double max_secant = 0.0;
    opt::BfgsOptions bfgs_opts;
    bfgs_opts.update_observer = [&](int, const SquareMatrix& h, std::span<const double> s,
                                    std::span<const double> y) {
      ParamVector hy(s.size());
      h.matvec(y, hy);
      for (std::size_t i = 0; i < s.size(); ++i) max_secant = std::max(max_secant, std::fabs(hy[i] - s[i]));
    };
    auto bfgs_obj = quadratic({1.0, 10.0});
    const auto bf = opt::bfgs_run(bfgs_obj, {1.0, 1.0}, {1e-6, 50, 20}, bfgs_opts);
    add(report, "bfgs_run secant identity", bf.status == opt::TermStatus::GradTol && max_secant < 1e-8);
  }

  {  // gradient-free methods never touch fd_gradient
    auto obj = quadratic({1.0, 1.0});
    opt::McConfig mc;
    mc.seed = 5;
    mc.delta = 0.2;
    mc.n_samples = 32;
    const auto res = opt::mc_run(obj, {1.0, -1.0}, mc, {1e-9, 60, 15});
    bool monotone = true;
    for (std::size_t i = 1; i < res.reports.size(); ++i)
      if (res.reports[i].loss > res.reports[i - 1].loss) monotone = false;
    add(report, "mc_run monotone and gradient-free", monotone && obj.gradient_count() == 0);
  }

  return report;
}

std::string render_text(const Report& report) {
  std::ostringstream os;
  for (const auto& c : report.checks) {
    os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << '\n';
  }
  os << (report.all_passed() ? "all checks passed" : "SOME CHECKS FAILED") << '\n';
  return os.str();
}

}  // namespace freqlab::verify
