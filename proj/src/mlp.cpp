#include "freqlab/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>

#include "freqlab/rng.hpp"

namespace freqlab::mlp {

namespace {

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

struct LayerLayout {
  std::size_t w_off, b_off;
  std::size_t in, out;
};

std::vector<LayerLayout> layer_layout(const MlpSpec& spec) {
  std::vector<LayerLayout> l;
  std::size_t off = 0;
  for (std::size_t i = 0; i + 1 < spec.widths.size(); ++i) {
    const auto in = static_cast<std::size_t>(spec.widths[i]);
    const auto out = static_cast<std::size_t>(spec.widths[i + 1]);
    l.push_back({off, off + in * out, in, out});
    off += (in + 1) * out;
  }
  return l;
}

// out rows [r0, r1) of one layer over an n-sample batch: bias, accumulate
// weight columns in ascending order, then the activation. The accumulation
// order is the contract every evaluation path shares, so cached and fresh
// forward passes agree bit for bit.
void layer_rows(const LayerLayout& l, std::span<const double> theta, const double* in_act, std::size_t n,
                double* out_act, std::size_t r0, std::size_t r1, bool hidden) {
  const double* w = theta.data() + l.w_off;
  const double* b = theta.data() + l.b_off;
  for (std::size_t r = r0; r < r1; ++r) {
    double* o = out_act + r * n;
    const double bias = b[r];
    for (std::size_t j = 0; j < n; ++j) o[j] = bias;
    const double* wr = w + r * l.in;
    for (std::size_t c = 0; c < l.in; ++c) {
      const double wv = wr[c];
      const double* ic = in_act + c * n;
      for (std::size_t j = 0; j < n; ++j) o[j] += wv * ic[j];
    }
    if (hidden)
      for (std::size_t j = 0; j < n; ++j) o[j] = sigmoid(o[j]);
  }
}

inline bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// Shared state of the caching MSE objective. Inputs and targets are stored
// feature-major ([feature][sample]) to match the kernel above.
struct BatchEngine {
  MlpSpec spec;
  std::vector<LayerLayout> layout;
  std::size_t p = 0, n = 0, out_dim = 0;
  std::vector<double> x_t, t_t;

  struct Scratch {
    bool valid = false;
    ParamVector theta;
    std::vector<std::vector<double>> act;  // act[l]: widths[l+1] x n
    double loss = 0.0;
  };

  std::mutex pool_mu;
  std::vector<std::unique_ptr<Scratch>> pool;

  explicit BatchEngine(const MlpSpec& s, const Dataset& data) : spec(s), layout(layer_layout(s)) {
    p = param_count(s);
    n = data.n;
    out_dim = data.out_dim;
    x_t.resize(data.in_dim * n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t d = 0; d < data.in_dim; ++d) x_t[d * n + j] = data.inputs[j * data.in_dim + d];
    t_t.resize(out_dim * n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < out_dim; ++k) t_t[k * n + j] = data.targets[j * out_dim + k];
  }

  std::unique_ptr<Scratch> acquire() {
    {
      std::lock_guard<std::mutex> lock(pool_mu);
      if (!pool.empty()) {
        auto s = std::move(pool.back());
        pool.pop_back();
        return s;
      }
    }
    auto s = std::make_unique<Scratch>();
    s->theta.resize(p);
    s->act.resize(layout.size());
    for (std::size_t l = 0; l < layout.size(); ++l) s->act[l].resize(layout[l].out * n);
    return s;
  }

  void release(std::unique_ptr<Scratch> s) {
    std::lock_guard<std::mutex> lock(pool_mu);
    pool.push_back(std::move(s));
  }

  void forward_from(Scratch& s, std::size_t l_first, std::size_t r0, std::size_t r1) const {
    const std::size_t L = layout.size();
    for (std::size_t l = l_first; l < L; ++l) {
      const double* in_act = (l == 0) ? x_t.data() : s.act[l - 1].data();
      const bool hidden = l + 1 < L;
      if (l == l_first)
        layer_rows(layout[l], s.theta, in_act, n, s.act[l].data(), r0, r1, hidden);
      else
        layer_rows(layout[l], s.theta, in_act, n, s.act[l].data(), 0, layout[l].out, hidden);
    }
  }

  double accumulate_loss(const Scratch& s) const {
    const auto& pred = s.act.back();
    double acc = 0.0;
    for (std::size_t i = 0; i < t_t.size(); ++i) {
      const double e = pred[i] - t_t[i];
      acc += e * e;
    }
    return acc / static_cast<double>(n * out_dim);
  }

  double eval(std::span<const double> theta, Scratch& s) const {
    if (!s.valid) {
      std::copy(theta.begin(), theta.end(), s.theta.begin());
      forward_from(s, 0, 0, layout[0].out);
      s.loss = accumulate_loss(s);
      s.valid = true;
      return s.loss;
    }
    // locate the changed parameter range against the cached vector
    std::size_t first = 0;
    while (first < p && same_bits(theta[first], s.theta[first])) ++first;
    if (first == p) return s.loss;
    std::size_t last = p - 1;
    while (last > first && same_bits(theta[last], s.theta[last])) --last;

    std::size_t l_first = 0, l_last = 0;
    for (std::size_t l = 0; l < layout.size(); ++l) {
      const std::size_t end = layout[l].b_off + layout[l].out;
      if (first >= layout[l].w_off && first < end) l_first = l;
      if (last >= layout[l].w_off && last < end) l_last = l;
    }

    std::size_t r0 = 0, r1 = layout[l_first].out;
    if (l_first == l_last) {
      // touched output rows of the single affected layer
      const auto& l = layout[l_first];
      const std::size_t row_first = first < l.b_off ? (first - l.w_off) / l.in : first - l.b_off;
      const std::size_t row_last = last < l.b_off ? (last - l.w_off) / l.in : last - l.b_off;
      if (row_last - row_first + 1 < l.out) {
        r0 = row_first;
        r1 = row_last + 1;
      }
    }
    std::copy(theta.begin() + first, theta.begin() + last + 1, s.theta.begin() + first);
    forward_from(s, l_first, r0, r1);
    s.loss = accumulate_loss(s);
    return s.loss;
  }
};

}  // namespace

void validate(const MlpSpec& spec) {
  if (spec.widths.size() < 2) throw Error(Errc::DimensionMismatch, "mlp: need at least one layer");
  for (int w : spec.widths)
    if (w < 1) throw Error(Errc::DimensionMismatch, "mlp: all widths must be >= 1");
}

std::size_t param_count(const MlpSpec& spec) {
  validate(spec);
  std::size_t p = 0;
  for (std::size_t l = 0; l + 1 < spec.widths.size(); ++l)
    p += (static_cast<std::size_t>(spec.widths[l]) + 1) * static_cast<std::size_t>(spec.widths[l + 1]);
  return p;
}

ParamVector pack(const MlpSpec& spec, const MlpParams& params) {
  const auto layout = layer_layout(spec);
  if (params.weights.size() != layout.size() || params.biases.size() != layout.size())
    throw Error(Errc::DimensionMismatch, "pack: layer count mismatch");
  ParamVector theta(param_count(spec));
  for (std::size_t l = 0; l < layout.size(); ++l) {
    if (params.weights[l].size() != layout[l].in * layout[l].out || params.biases[l].size() != layout[l].out)
      throw Error(Errc::DimensionMismatch, "pack: layer size mismatch");
    std::copy(params.weights[l].begin(), params.weights[l].end(), theta.begin() + layout[l].w_off);
    std::copy(params.biases[l].begin(), params.biases[l].end(), theta.begin() + layout[l].b_off);
  }
  return theta;
}

MlpParams unpack(const MlpSpec& spec, std::span<const double> theta) {
  const auto layout = layer_layout(spec);
  if (theta.size() != param_count(spec)) throw Error(Errc::DimensionMismatch, "unpack: theta has wrong length");
  MlpParams params;
  for (const auto& l : layout) {
    params.weights.emplace_back(theta.begin() + l.w_off, theta.begin() + l.w_off + l.in * l.out);
    params.biases.emplace_back(theta.begin() + l.b_off, theta.begin() + l.b_off + l.out);
  }
  return params;
}

ParamVector init_params(const MlpSpec& spec, std::uint64_t seed) {
  const auto layout = layer_layout(spec);
  ParamVector theta(param_count(spec));
  Rng rng(seed);
  for (const auto& l : layout) {
    const double stddev = std::sqrt(2.0 / static_cast<double>(l.in + l.out));
    for (std::size_t i = 0; i < l.in * l.out; ++i) theta[l.w_off + i] = rng.normal(0.0, stddev);
    for (std::size_t i = 0; i < l.out; ++i) theta[l.b_off + i] = rng.normal(0.0, stddev);
  }
  return theta;
}

std::vector<double> forward(const MlpSpec& spec, std::span<const double> theta, std::span<const double> x) {
  const auto layout = layer_layout(spec);
  if (theta.size() != param_count(spec)) throw Error(Errc::DimensionMismatch, "forward: theta has wrong length");
  if (x.size() != static_cast<std::size_t>(spec.widths.front()))
    throw Error(Errc::DimensionMismatch, "forward: input has wrong dimension");
  std::vector<double> a(x.begin(), x.end()), next;
  for (std::size_t l = 0; l < layout.size(); ++l) {
    next.assign(layout[l].out, 0.0);
    layer_rows(layout[l], theta, a.data(), 1, next.data(), 0, layout[l].out, l + 1 < layout.size());
    a.swap(next);
  }
  return a;
}

void validate(const MlpSpec& spec, const Dataset& data) {
  validate(spec);
  if (data.n == 0) throw Error(Errc::EmptyDataset, "dataset is empty");
  if (data.in_dim != static_cast<std::size_t>(spec.widths.front()) ||
      data.out_dim != static_cast<std::size_t>(spec.widths.back()))
    throw Error(Errc::DimensionMismatch, "dataset does not match network widths");
  if (data.inputs.size() != data.n * data.in_dim || data.targets.size() != data.n * data.out_dim)
    throw Error(Errc::DimensionMismatch, "dataset arrays do not match n");
}

double mse_loss(const MlpSpec& spec, std::span<const double> theta, const Dataset& data) {
  validate(spec, data);
  if (theta.size() != param_count(spec)) throw Error(Errc::DimensionMismatch, "mse_loss: theta has wrong length");
  BatchEngine engine(spec, data);
  auto s = engine.acquire();
  return engine.eval(theta, *s);
}

void batch_outputs(const MlpSpec& spec, std::span<const double> theta, const Dataset& data, std::span<double> out) {
  validate(spec, data);
  if (out.size() != data.n * data.out_dim) throw Error(Errc::DimensionMismatch, "batch_outputs: bad output span");
  BatchEngine engine(spec, data);
  auto s = engine.acquire();
  engine.eval(theta, *s);
  const auto& pred = s->act.back();
  for (std::size_t j = 0; j < data.n; ++j)
    for (std::size_t k = 0; k < data.out_dim; ++k) out[j * data.out_dim + k] = pred[k * data.n + j];
}

Objective make_mse_objective(const MlpSpec& spec, Dataset data) {
  validate(spec, data);
  auto engine = std::make_shared<BatchEngine>(spec, data);
  const std::size_t p = engine->p;
  return Objective(p, [engine](std::span<const double> theta) {
    auto s = engine->acquire();
    double loss;
    try {
      loss = engine->eval(theta, *s);
    } catch (...) {
      engine->release(std::move(s));
      throw;
    }
    engine->release(std::move(s));
    return loss;
  });
}

}  // namespace freqlab::mlp
