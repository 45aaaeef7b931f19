#include "freqlab/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "freqlab/rng.hpp"
#include "freqlab/threads.hpp"

namespace freqlab::opt {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

using linesearch::LineSearchOutcome;
using linesearch::LsStatus;
using linesearch::WolfeConfig;
using linesearch::wolfe_search;

void check_finite_loss(double loss, const char* who) {
  if (!std::isfinite(loss)) throw Error(Errc::NonFiniteLoss, std::string(who) + ": loss is not finite");
}

// Wolfe step with the shared failure protocol: a failed (or non-descending)
// search is retried once along -g; if that also fails the run stops with
// LineSearchFailed.
struct StepResult {
  bool ok = false;
  double alpha = 0.0;
  double loss = 0.0;
  bool restarted = false;  // the accepted direction was the -g retry
};

StepResult wolfe_step(const Objective& obj, std::span<const double> theta, ParamVector& d,
                      std::span<const double> g, const WolfeConfig& wolfe, const FdConfig& fd) {
  StepResult res;
  LineSearchOutcome out = wolfe_search(obj, theta, d, wolfe, fd);
  if (out.status != LsStatus::Accepted) {
    // already steepest descent? then the retry would repeat the same search
    bool is_steepest = true;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i] != -g[i]) {
        is_steepest = false;
        break;
      }
    if (is_steepest) return res;
    d = scaled(g, -1.0);
    out = wolfe_search(obj, theta, d, wolfe, fd);
    if (out.status != LsStatus::Accepted) return res;
    res.restarted = true;
  }
  res.ok = true;
  res.alpha = out.alpha;
  res.loss = out.phi_alpha;
  return res;
}

}  // namespace

const char* term_status_name(TermStatus s) {
  switch (s) {
    case TermStatus::GradTol: return "GradTol";
    case TermStatus::MaxIter: return "MaxIter";
    case TermStatus::Stalled: return "Stalled";
    case TermStatus::LineSearchFailed: return "LineSearchFailed";
  }
  return "Unknown";
}

RunResult gd_run(const Objective& obj, ParamVector theta0, double step_size, const StoppingRule& stop,
                 const GdOptions& opts) {
  if (!(step_size > 0.0)) throw Error(Errc::ConfigError, "gd_run: step_size must be positive");
  RunResult res;
  res.theta = std::move(theta0);
  double loss = obj.eval(res.theta);
  check_finite_loss(loss, "gd_run");
  ParamVector g = fd_gradient(obj, res.theta, opts.fd);
  double gn = nrm2(g);
  if (opts.callback) opts.callback(0, res.theta);
  res.reports.push_back({0, loss, gn, obj.eval_count()});
  if (gn <= stop.epsilon) {
    res.status = TermStatus::GradTol;
    return res;
  }
  for (int j = 1; j <= stop.max_iter; ++j) {
    axpy(-step_size, g, res.theta);
    loss = obj.eval(res.theta);
    check_finite_loss(loss, "gd_run");
    g = fd_gradient(obj, res.theta, opts.fd);
    gn = nrm2(g);
    if (opts.callback) opts.callback(j, res.theta);
    res.reports.push_back({j, loss, gn, obj.eval_count()});
    if (gn <= stop.epsilon) {
      res.status = TermStatus::GradTol;
      return res;
    }
  }
  res.status = TermStatus::MaxIter;
  return res;
}

RunResult cg_run(const Objective& obj, ParamVector theta0, const StoppingRule& stop, const CgOptions& opts) {
  RunResult res;
  res.theta = std::move(theta0);
  double loss = obj.eval(res.theta);
  ParamVector g = fd_gradient(obj, res.theta, opts.fd);
  double gn = nrm2(g);
  if (opts.callback) opts.callback(0, res.theta);
  res.reports.push_back({0, loss, gn, obj.eval_count()});
  if (gn <= stop.epsilon) {
    res.status = TermStatus::GradTol;
    return res;
  }
  ParamVector d = scaled(g, -1.0);
  for (int j = 1; j <= stop.max_iter; ++j) {
    if (opts.direction_observer) opts.direction_observer(j, d, g);
    const StepResult step = wolfe_step(obj, res.theta, d, g, opts.wolfe, opts.fd);
    if (!step.ok) {
      res.status = TermStatus::LineSearchFailed;
      return res;
    }
    axpy(step.alpha, d, res.theta);
    loss = step.loss;
    ParamVector g_new = fd_gradient(obj, res.theta, opts.fd);
    gn = nrm2(g_new);
    if (opts.callback) opts.callback(j, res.theta);
    res.reports.push_back({j, loss, gn, obj.eval_count()});
    if (gn <= stop.epsilon) {
      res.status = TermStatus::GradTol;
      return res;
    }
    const double beta = (dot(g_new, g_new) - dot(g_new, g)) / dot(g, g);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = -g_new[i] + beta * d[i];
    if (dot(d, g_new) >= 0.0) d = scaled(g_new, -1.0);
    g = std::move(g_new);
  }
  res.status = TermStatus::MaxIter;
  return res;
}

RunResult tnc_run(const Objective& obj, ParamVector theta0, const StoppingRule& stop, const TncOptions& opts) {
  const std::size_t p = obj.dim();
  const int cap = opts.inner_cap > 0 ? opts.inner_cap : static_cast<int>(std::min<std::size_t>(p, 40));
  const auto eta_of = opts.eta_rule ? opts.eta_rule : [](double gnorm) { return std::min(0.5, std::sqrt(gnorm)); };

  RunResult res;
  res.theta = std::move(theta0);
  double loss = obj.eval(res.theta);
  ParamVector g = fd_gradient(obj, res.theta, opts.fd);
  double gn = nrm2(g);
  if (opts.callback) opts.callback(0, res.theta);
  res.reports.push_back({0, loss, gn, obj.eval_count()});
  if (gn <= stop.epsilon) {
    res.status = TermStatus::GradTol;
    return res;
  }
  for (int j = 1; j <= stop.max_iter; ++j) {
    // inner conjugate-gradient loop on H d = -g
    const double eta = eta_of(gn);
    ParamVector pvec(p, 0.0);
    ParamVector r = scaled(g, -1.0);
    ParamVector l = r;
    double delta = dot(r, r);
    double rr = delta;
    ParamVector d;
    int i = 0;
    for (; i < cap; ++i) {
      const ParamVector q = fd_hessvec(obj, res.theta, l, opts.fd, &g);
      const double curv = dot(l, q);
      if (curv <= stop.epsilon * delta) break;  // indefinite curvature
      const double alpha_i = rr / curv;
      axpy(alpha_i, l, pvec);
      axpy(-alpha_i, q, r);
      const double rr_new = dot(r, r);
      if (std::sqrt(rr_new) / gn <= eta) {
        ++i;
        break;
      }
      const double beta_i = rr_new / rr;
      for (std::size_t k = 0; k < p; ++k) l[k] = r[k] + beta_i * l[k];
      delta = rr_new + beta_i * beta_i * delta;
      rr = rr_new;
    }
    d = (i == 0) ? scaled(g, -1.0) : pvec;
    if (opts.inner_observer) opts.inner_observer(j, i, d);

    const StepResult step = wolfe_step(obj, res.theta, d, g, opts.wolfe, opts.fd);
    if (!step.ok) {
      res.status = TermStatus::LineSearchFailed;
      return res;
    }
    axpy(step.alpha, d, res.theta);
    loss = step.loss;
    g = fd_gradient(obj, res.theta, opts.fd);
    gn = nrm2(g);
    if (opts.callback) opts.callback(j, res.theta);
    res.reports.push_back({j, loss, gn, obj.eval_count()});
    if (gn <= stop.epsilon) {
      res.status = TermStatus::GradTol;
      return res;
    }
  }
  res.status = TermStatus::MaxIter;
  return res;
}

RunResult bfgs_run(const Objective& obj, ParamVector theta0, const StoppingRule& stop, const BfgsOptions& opts) {
  const std::size_t p = obj.dim();
  RunResult res;
  res.theta = std::move(theta0);
  double loss = obj.eval(res.theta);
  ParamVector g = fd_gradient(obj, res.theta, opts.fd);
  double gn = nrm2(g);
  if (opts.callback) opts.callback(0, res.theta);
  res.reports.push_back({0, loss, gn, obj.eval_count()});
  if (gn <= stop.epsilon) {
    res.status = TermStatus::GradTol;
    return res;
  }
  SquareMatrix h = SquareMatrix::identity(p);
  ParamVector d(p), u(p);
  for (int j = 1; j <= stop.max_iter; ++j) {
    h.matvec(g, d);
    for (double& v : d) v = -v;
    if (opts.direction_observer) opts.direction_observer(j, d, g);
    const StepResult step = wolfe_step(obj, res.theta, d, g, opts.wolfe, opts.fd);
    if (!step.ok) {
      res.status = TermStatus::LineSearchFailed;
      return res;
    }
    const ParamVector s = scaled(d, step.alpha);
    axpy(step.alpha, d, res.theta);
    loss = step.loss;
    ParamVector g_new = fd_gradient(obj, res.theta, opts.fd);
    const ParamVector y = sub(g_new, g);
    const double sy = dot(s, y);
    if (sy > 1e-10 * nrm2(s) * nrm2(y)) {
      // expanded form of (I - s y'/s'y) H (I - y s'/s'y) + s s'/s'y
      h.matvec(y, u);
      const double rho = 1.0 / sy;
      const double c = rho * rho * dot(y, u) + rho;
      for (std::size_t a = 0; a < p; ++a) {
        const double sa = s[a], ua = u[a];
        for (std::size_t b = 0; b < p; ++b)
          h(a, b) += c * sa * s[b] - rho * (sa * u[b] + ua * s[b]);
      }
      if (opts.update_observer) opts.update_observer(j, h, s, y);
    }
    g = std::move(g_new);
    gn = nrm2(g);
    if (opts.callback) opts.callback(j, res.theta);
    res.reports.push_back({j, loss, gn, obj.eval_count()});
    if (gn <= stop.epsilon) {
      res.status = TermStatus::GradTol;
      return res;
    }
  }
  res.status = TermStatus::MaxIter;
  return res;
}

RunResult lbfgs_run(const Objective& obj, ParamVector theta0, int memory, const StoppingRule& stop,
                    const LbfgsOptions& opts) {
  if (memory < 1) throw Error(Errc::ConfigError, "lbfgs_run: memory must be >= 1");
  const std::size_t p = obj.dim();
  RunResult res;
  res.theta = std::move(theta0);
  double loss = obj.eval(res.theta);
  ParamVector g = fd_gradient(obj, res.theta, opts.fd);
  double gn = nrm2(g);
  if (opts.callback) opts.callback(0, res.theta);
  res.reports.push_back({0, loss, gn, obj.eval_count()});
  if (gn <= stop.epsilon) {
    res.status = TermStatus::GradTol;
    return res;
  }
  struct Pair {
    ParamVector s, y;
    double rho;
  };
  std::deque<Pair> pairs;
  ParamVector d = scaled(g, -1.0);
  std::vector<double> alpha_tmp;
  for (int j = 1; j <= stop.max_iter; ++j) {
    if (opts.direction_observer) opts.direction_observer(j, d, g);
    const StepResult step = wolfe_step(obj, res.theta, d, g, opts.wolfe, opts.fd);
    if (!step.ok) {
      res.status = TermStatus::LineSearchFailed;
      return res;
    }
    const ParamVector s = scaled(d, step.alpha);
    axpy(step.alpha, d, res.theta);
    loss = step.loss;
    ParamVector g_new = fd_gradient(obj, res.theta, opts.fd);
    const ParamVector y = sub(g_new, g);
    const double sy = dot(s, y);
    if (sy > 0.0) {
      pairs.push_back({s, y, 1.0 / sy});
      if (pairs.size() > static_cast<std::size_t>(memory)) pairs.pop_front();
    }
    g = std::move(g_new);
    gn = nrm2(g);
    if (opts.callback) opts.callback(j, res.theta);
    res.reports.push_back({j, loss, gn, obj.eval_count()});
    if (gn <= stop.epsilon) {
      res.status = TermStatus::GradTol;
      return res;
    }
    // two-loop recursion with H_0 = I
    ParamVector q = g;
    const std::size_t L = pairs.size();
    alpha_tmp.assign(L, 0.0);
    for (std::size_t i = L; i-- > 0;) {
      alpha_tmp[i] = pairs[i].rho * dot(pairs[i].s, q);
      axpy(-alpha_tmp[i], pairs[i].y, q);
    }
    for (std::size_t i = 0; i < L; ++i) {
      const double beta = pairs[i].rho * dot(pairs[i].y, q);
      axpy(alpha_tmp[i] - beta, pairs[i].s, q);
    }
    for (std::size_t i = 0; i < p; ++i) d[i] = -q[i];
  }
  res.status = TermStatus::MaxIter;
  return res;
}

RunResult powell_run(const Objective& obj, ParamVector theta0, const StoppingRule& stop, const PowellOptions& opts) {
  const std::size_t p = obj.dim();
  RunResult res;
  res.theta = std::move(theta0);
  double loss = obj.eval(res.theta);
  if (opts.callback) opts.callback(0, res.theta);
  res.reports.push_back({0, loss, kNan, obj.eval_count()});

  // direction set starts as the coordinate basis
  std::vector<ParamVector> dirs(p, ParamVector(p, 0.0));
  for (std::size_t i = 0; i < p; ++i) dirs[i][i] = 1.0;

  ParamVector probe(p);
  // golden-section minimization over lambda in [0, 1]; the step is taken only
  // when it strictly improves the loss
  const auto line_min = [&](const ParamVector& y, double fy, const ParamVector& s) {
    const auto f = [&](double lambda) {
      probe = y;
      axpy(lambda, s, probe);
      return obj.eval(probe);
    };
    const double lambda = linesearch::golden_section(f, 0.0, 1.0, opts.golden_tol);
    const double f_new = f(lambda);
    if (f_new < fy) {
      ParamVector moved = probe;
      return std::make_pair(std::move(moved), f_new);
    }
    return std::make_pair(y, fy);
  };

  for (int j = 1; j <= stop.max_iter; ++j) {
    // one sweep of line minimizations along every direction
    ParamVector y = res.theta;
    double fy = loss;
    const double f1 = fy;
    double best_dec = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t k = 0; k < p; ++k) {
      auto [y_next, f_next] = line_min(y, fy, dirs[k]);
      const double dec = fy - f_next;
      if (dec > best_dec) {
        best_dec = dec;
        best_idx = k;
      }
      y = std::move(y_next);
      fy = f_next;
    }
    ParamVector sp = sub(y, res.theta);
    const double sp_norm = nrm2(sp);
    if (sp_norm <= stop.epsilon) {
      res.status = TermStatus::Stalled;
      return res;
    }
    const double f2 = fy;
    probe = y;
    axpy(1.0, sp, probe);  // 2 y_p - y_0
    const double f3 = obj.eval(probe);
    const double dm = best_dec;
    if (2.0 * (f1 - 2.0 * f2 + f3) * (f1 - f2 - dm) * (f1 - f2 - dm) < dm * (f1 - f3) * (f1 - f3)) {
      auto [y_new, f_new] = line_min(y, fy, sp);
      res.theta = std::move(y_new);
      loss = f_new;
      dirs.erase(dirs.begin() + static_cast<std::ptrdiff_t>(best_idx));
      dirs.push_back(std::move(sp));
    } else {
      res.theta = std::move(y);
      loss = fy;
    }
    if (opts.callback) opts.callback(j, res.theta);
    res.reports.push_back({j, loss, kNan, obj.eval_count()});
  }
  res.status = TermStatus::MaxIter;
  return res;
}

RunResult pso_run(const Objective& obj, ParamVector theta0, const SwarmConfig& swarm, const StoppingRule& stop) {
  const std::size_t p = obj.dim();
  const std::size_t n = 2 * p;
  if (n > swarm.max_swarm)
    throw Error(Errc::SwarmTooLarge, "pso_run: swarm of " + std::to_string(n) + " particles exceeds the budget");

  Rng rng(swarm.seed);
  std::vector<ParamVector> pos(n, ParamVector(p));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < p; ++k) pos[i][k] = theta0[k] + rng.uniform(-swarm.init_width, swarm.init_width);

  std::vector<double> loss(n);
  parallel_chunks(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) loss[i] = obj.eval(pos[i]);
  });

  std::vector<ParamVector> pbest = pos;
  std::vector<double> pbest_loss = loss;
  std::size_t gbest_idx = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (pbest_loss[i] < pbest_loss[gbest_idx]) gbest_idx = i;
  ParamVector gbest = pbest[gbest_idx];
  double gbest_loss = pbest_loss[gbest_idx];

  RunResult res;
  res.theta = gbest;
  if (swarm.callback) swarm.callback(0, gbest);
  res.reports.push_back({0, gbest_loss, kNan, obj.eval_count()});

  // history of gbest positions for the stall window
  std::deque<ParamVector> history{gbest};
  std::vector<double> r1(n), r2(n);

  for (int j = 1; j <= stop.max_iter; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      r1[i] = rng.uniform();
      r2[i] = rng.uniform();
    }
    parallel_chunks(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        ParamVector& x = pos[i];
        const ParamVector& pb = pbest[i];
        const double c1 = 2.0 * r1[i], c2 = 2.0 * r2[i];
        const std::size_t axis = i % p;
        const double drift = i < p ? 1.0 : -1.0;
        for (std::size_t k = 0; k < p; ++k) x[k] += c1 * (pb[k] - x[k]) + c2 * (gbest[k] - x[k]);
        x[axis] += drift;
        loss[i] = obj.eval(x);
      }
    });
    for (std::size_t i = 0; i < n; ++i) {
      if (loss[i] < pbest_loss[i]) {
        pbest_loss[i] = loss[i];
        pbest[i] = pos[i];
      }
    }
    gbest_idx = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (pbest_loss[i] < pbest_loss[gbest_idx]) gbest_idx = i;
    if (pbest_loss[gbest_idx] < gbest_loss) {
      gbest_loss = pbest_loss[gbest_idx];
      gbest = pbest[gbest_idx];
    }
    if (swarm.callback) swarm.callback(j, gbest);
    res.reports.push_back({j, gbest_loss, kNan, obj.eval_count()});

    history.push_back(gbest);
    if (history.size() > static_cast<std::size_t>(stop.stall_window) + 1) history.pop_front();
    if (history.size() == static_cast<std::size_t>(stop.stall_window) + 1 &&
        nrm2(sub(history.back(), history.front())) <= stop.epsilon) {
      res.theta = std::move(gbest);
      res.status = TermStatus::Stalled;
      return res;
    }
  }
  res.theta = std::move(gbest);
  res.status = TermStatus::MaxIter;
  return res;
}

RunResult mc_run(const Objective& obj, ParamVector theta0, const McConfig& mc, const StoppingRule& stop) {
  if (!(mc.delta > 0.0)) throw Error(Errc::ConfigError, "mc_run: delta must be positive");
  if (mc.n_samples < 1) throw Error(Errc::ConfigError, "mc_run: n_samples must be >= 1");
  const std::size_t p = obj.dim();
  const std::size_t k = static_cast<std::size_t>(mc.n_samples);

  RunResult res;
  res.theta = std::move(theta0);
  double loss = obj.eval(res.theta);
  if (mc.callback) mc.callback(0, res.theta);
  res.reports.push_back({0, loss, kNan, obj.eval_count()});

  std::vector<ParamVector> cand(k, ParamVector(p));
  std::vector<double> cand_loss(k);
  std::deque<double> history{loss};

  for (int j = 1; j <= stop.max_iter; ++j) {
    // candidates use per-(iteration, index) derived streams so the fan-out
    // stays deterministic
    parallel_chunks(k, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        Rng rng(mix_seed(mc.seed, static_cast<std::uint64_t>(j), i));
        ParamVector& c = cand[i];
        for (std::size_t a = 0; a < p; ++a) c[a] = res.theta[a] + rng.normal(0.0, mc.delta);
        cand_loss[i] = obj.eval(c);
      }
    });
    std::size_t best = k;  // k = incumbent
    double best_loss = loss;
    for (std::size_t i = 0; i < k; ++i) {
      if (cand_loss[i] < best_loss) {
        best_loss = cand_loss[i];
        best = i;
      }
    }
    if (best != k) {
      res.theta = cand[best];
      loss = best_loss;
    }
    if (mc.callback) mc.callback(j, res.theta);
    res.reports.push_back({j, loss, kNan, obj.eval_count()});

    history.push_back(loss);
    if (history.size() > static_cast<std::size_t>(stop.stall_window) + 1) history.pop_front();
    if (history.size() == static_cast<std::size_t>(stop.stall_window) + 1 &&
        history.front() - loss <= stop.epsilon) {
      res.status = TermStatus::Stalled;
      return res;
    }
  }
  res.status = TermStatus::MaxIter;
  return res;
}

}  // namespace freqlab::opt
