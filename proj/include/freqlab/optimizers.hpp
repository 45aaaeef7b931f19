#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "freqlab/linesearch.hpp"
#include "freqlab/objective.hpp"
#include "freqlab/vec.hpp"

namespace freqlab::opt {

enum class TermStatus { GradTol, MaxIter, Stalled, LineSearchFailed };

const char* term_status_name(TermStatus s);

struct StoppingRule {
  double epsilon = 1e-6;  // gradient-norm tolerance; stall / sweep tolerance for the gradient-free methods
  int max_iter = 1000;
  int stall_window = 20;  // PSO and Monte-Carlo stall detection
};

struct IterationReport {
  int epoch = 0;
  double loss = 0.0;
  double grad_norm = 0.0;  // NaN when the method uses no gradients
  std::uint64_t evals = 0; // cumulative objective evaluations
};

struct RunResult {
  ParamVector theta;
  std::vector<IterationReport> reports;
  TermStatus status = TermStatus::MaxIter;
};

// Invoked once per outer iteration, epoch 0 included. The callback must not
// mutate theta; spectral probes hang off this hook.
using RunCallback = std::function<void(int epoch, std::span<const double> theta)>;

struct GdOptions {
  FdConfig fd;
  RunCallback callback;
};

struct CgOptions {
  linesearch::WolfeConfig wolfe;
  FdConfig fd;
  RunCallback callback;
  // test hook: observes each accepted step's direction and current gradient
  std::function<void(int epoch, std::span<const double> d, std::span<const double> g)> direction_observer;
};

struct TncOptions {
  linesearch::WolfeConfig wolfe;
  FdConfig fd;
  RunCallback callback;
  // forcing term eta as a function of |g|; defaults to min(0.5, sqrt(|g|))
  std::function<double(double)> eta_rule;
  int inner_cap = 0;  // 0: min(dim, 40)
  std::function<void(int epoch, int inner_iters, std::span<const double> d)> inner_observer;
};

struct BfgsOptions {
  linesearch::WolfeConfig wolfe;
  FdConfig fd;
  RunCallback callback;
  // test hook: observes H after each accepted update together with (s, y)
  std::function<void(int epoch, const SquareMatrix& h, std::span<const double> s, std::span<const double> y)>
      update_observer;
  std::function<void(int epoch, std::span<const double> d, std::span<const double> g)> direction_observer;
};

struct LbfgsOptions {
  linesearch::WolfeConfig wolfe;
  FdConfig fd;
  RunCallback callback;
  std::function<void(int epoch, std::span<const double> d, std::span<const double> g)> direction_observer;
};

struct PowellOptions {
  double golden_tol = 1e-6;
  RunCallback callback;
};

struct SwarmConfig {
  double init_width = 0.5;     // particles start at theta0 + U[-w, w] per component
  std::size_t max_swarm = 5000;
  std::uint64_t seed = 0;
  RunCallback callback;
};

struct McConfig {
  double delta = 0.05;  // componentwise standard deviation of the proposal
  int n_samples = 100;
  std::uint64_t seed = 0;
  RunCallback callback;
};

// Plain gradient descent baseline: theta <- theta - step_size * g.
RunResult gd_run(const Objective& obj, ParamVector theta0, double step_size, const StoppingRule& stop,
                 const GdOptions& opts = {});

// Polak-Ribiere conjugate gradient with strong Wolfe steps; the direction is
// reset to -g whenever d'g >= 0.
RunResult cg_run(const Objective& obj, ParamVector theta0, const StoppingRule& stop, const CgOptions& opts = {});

// Truncated Newton: inner conjugate-gradient loop on the Newton system with
// finite-difference Hessian-vector products, exiting on indefinite curvature,
// the forcing test |r|/|g| <= eta, or the inner cap.
RunResult tnc_run(const Objective& obj, ParamVector theta0, const StoppingRule& stop, const TncOptions& opts = {});

// BFGS with the inverse-Hessian update, H_0 = I; the update is skipped when
// s'y <= 1e-10 |s||y|.
RunResult bfgs_run(const Objective& obj, ParamVector theta0, const StoppingRule& stop, const BfgsOptions& opts = {});

// L-BFGS two-loop recursion over the last `memory` (s, y) pairs with H_0 = I;
// pairs with s'y <= 0 are dropped.
RunResult lbfgs_run(const Objective& obj, ParamVector theta0, int memory, const StoppingRule& stop,
                    const LbfgsOptions& opts = {});

// Powell's conjugate-direction method: golden-section line minimizations over
// lambda in [0, 1] along each direction, with the composite-direction
// replacement test. Uses no gradients.
RunResult powell_run(const Objective& obj, ParamVector theta0, const StoppingRule& stop,
                     const PowellOptions& opts = {});

// Particle swarm with N = 2*dim particles and fixed drift columns (I, -I).
// Uses no gradients.
RunResult pso_run(const Objective& obj, ParamVector theta0, const SwarmConfig& swarm, const StoppingRule& stop);

// Monte-Carlo-like search: per iteration draws n_samples Gaussian candidates
// around the incumbent and keeps the argmin. Uses no gradients.
RunResult mc_run(const Objective& obj, ParamVector theta0, const McConfig& mc, const StoppingRule& stop);

}  // namespace freqlab::opt
