#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>

#include "freqlab/common.hpp"

namespace freqlab {

// Black-box scalar objective over a flat parameter vector. This is the only
// interface the optimizers see. Copies share the evaluation counters, so a
// handle can be passed around while the harness keeps the tally.
class Objective {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  Objective(std::size_t dim, Fn fn)
      : dim_(dim), fn_(std::move(fn)), counters_(std::make_shared<Counters>()) {}

  double eval(std::span<const double> theta) const {
    if (theta.size() != dim_) throw Error(Errc::DimensionMismatch, "objective: theta has wrong dimension");
    counters_->evals.fetch_add(1, std::memory_order_relaxed);
    return fn_(theta);
  }

  std::size_t dim() const { return dim_; }
  std::uint64_t eval_count() const { return counters_->evals.load(std::memory_order_relaxed); }
  std::uint64_t gradient_count() const { return counters_->grads.load(std::memory_order_relaxed); }
  void count_gradient() const { counters_->grads.fetch_add(1, std::memory_order_relaxed); }

 private:
  struct Counters {
    std::atomic<std::uint64_t> evals{0};
    std::atomic<std::uint64_t> grads{0};
  };
  std::size_t dim_;
  Fn fn_;
  std::shared_ptr<Counters> counters_;
};

struct FdConfig {
  double zeta = 1.49e-8;                 // forward-difference step
  double hv_step = 1.2206555615733703e-4;  // sqrt(zeta), Hessian-vector step scale
};

// Forward-difference gradient g_i = (L(theta + zeta e_i) - L(theta)) / zeta.
// The base loss is evaluated once and shared, so a call consumes exactly
// dim+1 loss evaluations. Perturbed components are evaluated concurrently
// (see threads.hpp); results are identical to a sequential pass.
ParamVector fd_gradient(const Objective& obj, std::span<const double> theta, const FdConfig& cfg = {});

// Hessian-vector product (g(theta + h v) - g(theta)) / h with the norm-scaled
// step h = hv_step * (1 + |theta|) / max(|v|, eps). Returns the zero vector
// for v = 0 without evaluating. base_grad, when supplied, must equal
// fd_gradient(obj, theta, cfg) and saves that evaluation.
ParamVector fd_hessvec(const Objective& obj, std::span<const double> theta, std::span<const double> v,
                       const FdConfig& cfg = {}, const ParamVector* base_grad = nullptr);

}  // namespace freqlab
