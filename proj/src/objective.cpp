#include "freqlab/objective.hpp"

#include <atomic>
#include <limits>

#include "freqlab/threads.hpp"
#include "freqlab/vec.hpp"

namespace freqlab {

ParamVector fd_gradient(const Objective& obj, std::span<const double> theta, const FdConfig& cfg) {
  const std::size_t p = obj.dim();
  if (theta.size() != p) throw Error(Errc::DimensionMismatch, "fd_gradient: theta has wrong dimension");
  if (!all_finite(theta)) throw Error(Errc::NonFiniteLoss, "fd_gradient: theta is not finite");

  const double base = obj.eval(theta);
  if (!std::isfinite(base)) throw Error(Errc::NonFiniteLoss, "fd_gradient: base loss is not finite");

  ParamVector g(p);
  std::atomic<bool> bad{false};
  parallel_chunks(p, [&](std::size_t begin, std::size_t end) {
    ParamVector local(theta.begin(), theta.end());
    for (std::size_t i = begin; i < end; ++i) {
      const double old = local[i];
      local[i] = old + cfg.zeta;
      const double fx = obj.eval(local);
      local[i] = old;
      if (!std::isfinite(fx)) {
        bad.store(true, std::memory_order_relaxed);
        return;
      }
      g[i] = (fx - base) / cfg.zeta;
    }
  });
  if (bad.load()) throw Error(Errc::NonFiniteLoss, "fd_gradient: perturbed loss is not finite");
  obj.count_gradient();
  return g;
}

ParamVector fd_hessvec(const Objective& obj, std::span<const double> theta, std::span<const double> v,
                       const FdConfig& cfg, const ParamVector* base_grad) {
  if (v.size() != theta.size()) throw Error(Errc::DimensionMismatch, "fd_hessvec: v has wrong dimension");
  const double vnorm = nrm2(v);
  if (vnorm == 0.0) return ParamVector(theta.size(), 0.0);

  const double h = cfg.hv_step * (1.0 + nrm2(theta)) / std::max(vnorm, std::numeric_limits<double>::epsilon());
  ParamVector shifted(theta.begin(), theta.end());
  axpy(h, v, shifted);

  const ParamVector g1 = fd_gradient(obj, shifted, cfg);
  const ParamVector g0 = base_grad ? *base_grad : fd_gradient(obj, theta, cfg);

  ParamVector hv(theta.size());
  for (std::size_t i = 0; i < hv.size(); ++i) hv[i] = (g1[i] - g0[i]) / h;
  return hv;
}

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::ZeroTargetFrequency: return "ZeroTargetFrequency";
    case Errc::DegenerateDenominator: return "DegenerateDenominator";
    case Errc::SwarmTooLarge: return "SwarmTooLarge";
    case Errc::CountTooLarge: return "CountTooLarge";
    case Errc::BadMagic: return "BadMagic";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace freqlab
