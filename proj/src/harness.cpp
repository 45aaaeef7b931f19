#include "freqlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "freqlab/optimizers.hpp"
#include "freqlab/rng.hpp"
#include "freqlab/spectrum.hpp"

namespace freqlab::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kTagPso = 1;
constexpr std::uint64_t kTagMc = 2;
constexpr std::uint64_t kTagSubsample = 3;
constexpr std::uint64_t kTagClusters = 4;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_delta(double d) {
  // compact label for column names: 2 -> "2", 2.5 -> "2.5"
  std::ostringstream os;
  os << d;
  return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

const char* target_name(TargetId t) {
  switch (t) {
    case TargetId::Sin1_3: return "sin1_3";
    case TargetId::Sin1_3_5: return "sin1_3_5";
    case TargetId::MnistSubset: return "mnist_subset";
    case TargetId::SyntheticClusters: return "synthetic_clusters";
  }
  return "unknown";
}

TargetId target_from_name(const std::string& name) {
  if (name == "sin1_3") return TargetId::Sin1_3;
  if (name == "sin1_3_5") return TargetId::Sin1_3_5;
  if (name == "mnist_subset") return TargetId::MnistSubset;
  if (name == "synthetic_clusters") return TargetId::SyntheticClusters;
  throw Error(Errc::ConfigError, "unknown target: " + name);
}

json config_to_json(const FullConfig& cfg) {
  const auto& e = cfg.experiment;
  const auto& p = cfg.params;
  json j;
  j["name"] = e.name;
  j["target"] = target_name(e.target);
  j["widths"] = e.widths;
  j["optimizer"] = e.optimizer;
  j["seed"] = e.seed;
  j["epochs"] = e.epochs;
  j["record_every"] = e.record_every;
  j["epsilon"] = e.epsilon;
  j["stall_window"] = e.stall_window;
  j["samples"] = e.samples;
  j["peak_threshold"] = e.peak_threshold;
  j["deltas"] = e.deltas;
  if (!e.mnist_images.empty()) j["mnist_images"] = e.mnist_images;
  if (!e.mnist_labels.empty()) j["mnist_labels"] = e.mnist_labels;
  j["out_dir"] = e.out_dir;
  json op;
  op["step_size"] = p.step_size;
  op["memory"] = p.memory;
  op["eta"] = p.eta;
  op["inner_cap"] = p.inner_cap;
  op["golden_tol"] = p.golden_tol;
  op["init_width"] = p.init_width;
  op["max_swarm"] = p.max_swarm;
  op["mc_delta"] = p.mc_delta;
  op["mc_samples"] = p.mc_samples;
  j["optimizer_params"] = op;
  return j;
}

FullConfig config_from_json(const json& j) {
  FullConfig cfg;
  auto& e = cfg.experiment;
  auto& p = cfg.params;
  try {
    if (j.contains("name")) e.name = j.at("name").get<std::string>();
    if (j.contains("target")) e.target = target_from_name(j.at("target").get<std::string>());
    if (j.contains("widths")) e.widths = j.at("widths").get<std::vector<int>>();
    if (j.contains("optimizer")) e.optimizer = j.at("optimizer").get<std::string>();
    if (j.contains("seed")) e.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("epochs")) e.epochs = j.at("epochs").get<int>();
    if (j.contains("record_every")) e.record_every = j.at("record_every").get<int>();
    if (j.contains("epsilon")) e.epsilon = j.at("epsilon").get<double>();
    if (j.contains("stall_window")) e.stall_window = j.at("stall_window").get<int>();
    if (j.contains("samples")) e.samples = j.at("samples").get<int>();
    if (j.contains("peak_threshold")) e.peak_threshold = j.at("peak_threshold").get<double>();
    if (j.contains("deltas")) e.deltas = j.at("deltas").get<std::vector<double>>();
    if (j.contains("mnist_images")) e.mnist_images = j.at("mnist_images").get<std::string>();
    if (j.contains("mnist_labels")) e.mnist_labels = j.at("mnist_labels").get<std::string>();
    if (j.contains("out_dir")) e.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("optimizer_params")) {
      const json& op = j.at("optimizer_params");
      if (op.contains("step_size")) p.step_size = op.at("step_size").get<double>();
      if (op.contains("memory")) p.memory = op.at("memory").get<int>();
      if (op.contains("eta")) p.eta = op.at("eta").get<double>();
      if (op.contains("inner_cap")) p.inner_cap = op.at("inner_cap").get<int>();
      if (op.contains("golden_tol")) p.golden_tol = op.at("golden_tol").get<double>();
      if (op.contains("init_width")) p.init_width = op.at("init_width").get<double>();
      if (op.contains("max_swarm")) p.max_swarm = op.at("max_swarm").get<std::size_t>();
      if (op.contains("mc_delta")) p.mc_delta = op.at("mc_delta").get<double>();
      if (op.contains("mc_samples")) p.mc_samples = op.at("mc_samples").get<int>();
    }
  } catch (const json::exception& ex) {
    throw Error(Errc::ConfigError, std::string("config: ") + ex.what());
  }
  if (e.record_every < 1) throw Error(Errc::ConfigError, "config: record_every must be >= 1");
  if (e.epochs < 0) throw Error(Errc::ConfigError, "config: epochs must be >= 0");
  if (e.widths.size() < 2) throw Error(Errc::ConfigError, "config: widths needs at least two entries");
  return cfg;
}

FullConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw Error(Errc::ConfigError, std::string("config parse: ") + ex.what());
  }
  return config_from_json(j);
}

std::uint64_t fingerprint(const FullConfig& cfg) {
  json j = config_to_json(cfg);
  j.erase("out_dir");
  j.erase("name");
  return fnv1a(j.dump());
}

double target_value(TargetId target, double x) {
  switch (target) {
    case TargetId::Sin1_3: return std::sin(x) + std::sin(3.0 * x);
    case TargetId::Sin1_3_5: return std::sin(x) + std::sin(3.0 * x) + std::sin(5.0 * x);
    default: throw Error(Errc::ConfigError, "target_value: not a 1-d target");
  }
}

mlp::Dataset build_1d_dataset(TargetId target, int n) {
  if (n < 2) throw Error(Errc::ConfigError, "build_1d_dataset: need n >= 2");
  mlp::Dataset data;
  data.n = static_cast<std::size_t>(n);
  data.in_dim = 1;
  data.out_dim = 1;
  data.inputs.resize(data.n);
  data.targets.resize(data.n);
  const double lo = -3.14, hi = 3.14;
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (int j = 0; j < n; ++j) data.inputs[static_cast<std::size_t>(j)] = lo + h * j;
  data.inputs.back() = hi;  // endpoint exact
  for (std::size_t j = 0; j < data.n; ++j) data.targets[j] = target_value(target, data.inputs[j]);
  return data;
}

namespace {

std::uint32_t read_be32(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

std::vector<unsigned char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

mlp::Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  const auto img = read_file(images_path);
  const auto lab = read_file(labels_path);
  if (img.size() < 16) throw Error(Errc::TruncatedFile, "images file shorter than its header");
  if (read_be32(img.data()) != 0x00000803u) throw Error(Errc::BadMagic, "images file has wrong magic");
  const std::size_t count = read_be32(img.data() + 4);
  const std::size_t rows = read_be32(img.data() + 8);
  const std::size_t cols = read_be32(img.data() + 12);
  if (img.size() < 16 + count * rows * cols) throw Error(Errc::TruncatedFile, "images file truncated");

  if (lab.size() < 8) throw Error(Errc::TruncatedFile, "labels file shorter than its header");
  if (read_be32(lab.data()) != 0x00000801u) throw Error(Errc::BadMagic, "labels file has wrong magic");
  const std::size_t lab_count = read_be32(lab.data() + 4);
  if (lab.size() < 8 + lab_count) throw Error(Errc::TruncatedFile, "labels file truncated");
  if (lab_count != count) throw Error(Errc::CountMismatch, "images and labels disagree on the sample count");

  mlp::Dataset data;
  data.n = count;
  data.in_dim = rows * cols;
  data.out_dim = 10;
  data.inputs.resize(count * data.in_dim);
  data.targets.assign(count * 10, 0.0);
  for (std::size_t i = 0; i < count * data.in_dim; ++i)
    data.inputs[i] = static_cast<double>(img[16 + i]) / 255.0;
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned label = lab[8 + i];
    if (label > 9) throw Error(Errc::CountMismatch, "label byte out of range");
    data.targets[i * 10 + label] = 1.0;
  }
  return data;
}

mlp::Dataset subsample(const mlp::Dataset& data, std::size_t count, std::uint64_t seed) {
  if (count > data.n) throw Error(Errc::CountTooLarge, "subsample: count exceeds dataset size");
  std::vector<std::size_t> idx(data.n);
  for (std::size_t i = 0; i < data.n; ++i) idx[i] = i;
  Rng rng(seed);
  for (std::size_t i = data.n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);

  mlp::Dataset out;
  out.n = count;
  out.in_dim = data.in_dim;
  out.out_dim = data.out_dim;
  out.inputs.resize(count * data.in_dim);
  out.targets.resize(count * data.out_dim);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t s = idx[i];
    std::copy_n(data.inputs.begin() + static_cast<std::ptrdiff_t>(s * data.in_dim), data.in_dim,
                out.inputs.begin() + static_cast<std::ptrdiff_t>(i * data.in_dim));
    std::copy_n(data.targets.begin() + static_cast<std::ptrdiff_t>(s * data.out_dim), data.out_dim,
                out.targets.begin() + static_cast<std::ptrdiff_t>(i * data.out_dim));
  }
  return out;
}

mlp::Dataset make_cluster_dataset(std::size_t n, std::size_t dim, std::size_t classes, std::uint64_t seed) {
  if (n == 0 || dim == 0 || classes == 0) throw Error(Errc::ConfigError, "make_cluster_dataset: empty shape");
  Rng rng(seed);
  std::vector<double> centers(classes * dim);
  for (double& c : centers) c = rng.normal(0.0, 0.5);
  mlp::Dataset data;
  data.n = n;
  data.in_dim = dim;
  data.out_dim = classes;
  data.inputs.resize(n * dim);
  data.targets.assign(n * classes, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = i % classes;
    for (std::size_t d = 0; d < dim; ++d)
      data.inputs[i * dim + d] = centers[cls * dim + d] + rng.normal(0.0, 0.25);
    data.targets[i * classes + cls] = 1.0;
  }
  return data;
}

void emit_csv(const Trace& trace, const std::string& path) {
  if (trace.rows.empty()) throw Error(Errc::EmptyDataset, "emit_csv: trace has no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write: " + path);
  out << "epoch,loss";
  for (const auto& c : trace.columns) out << ',' << c;
  out << '\n';
  for (const auto& row : trace.rows) {
    out << row.epoch << ',' << format_double(row.loss);
    for (double v : row.values) out << ',' << format_double(v);
    out << '\n';
  }
  if (!out) throw Error(Errc::IoError, "write failed: " + path);
}

Trace parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open: " + path);
  Trace trace;
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::IoError, "empty trace file: " + path);
  std::stringstream header(line);
  std::string cell;
  std::vector<std::string> cols;
  while (std::getline(header, cell, ',')) cols.push_back(cell);
  if (cols.size() < 2 || cols[0] != "epoch" || cols[1] != "loss")
    throw Error(Errc::IoError, "unexpected trace header: " + line);
  trace.columns.assign(cols.begin() + 2, cols.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row_in(line);
    Trace::Row row;
    std::getline(row_in, cell, ',');
    row.epoch = std::stoi(cell);
    std::getline(row_in, cell, ',');
    row.loss = std::strtod(cell.c_str(), nullptr);
    while (std::getline(row_in, cell, ',')) row.values.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.values.size() != trace.columns.size()) throw Error(Errc::IoError, "ragged trace row: " + line);
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

void emit_heatmap_svg(const Trace& trace, const std::string& path) {
  if (trace.rows.empty() || trace.columns.empty())
    throw Error(Errc::EmptyDataset, "emit_heatmap_svg: nothing to draw");
  const std::size_t n_cols = trace.rows.size();     // epochs across
  const std::size_t n_rows = trace.columns.size();  // one band per tracked series
  const double cell_w = std::max(2.0, std::min(24.0, 960.0 / static_cast<double>(n_cols)));
  const double cell_h = 36.0;
  const double margin_left = 110.0, margin_top = 24.0, margin_bottom = 42.0;
  const double width = margin_left + cell_w * static_cast<double>(n_cols) + 16.0;
  const double height = margin_top + cell_h * static_cast<double>(n_rows) + margin_bottom;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t c = 0; c < n_cols; ++c) {
      const double v = std::clamp(trace.rows[c].values[r], 0.0, 1.0);
      const int red = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      const int blue = static_cast<int>(std::lround(255.0 * v));
      out << "<rect class=\"cell\" x=\"" << margin_left + cell_w * static_cast<double>(c) << "\" y=\""
          << margin_top + cell_h * static_cast<double>(r) << "\" width=\"" << cell_w << "\" height=\"" << cell_h
          << "\" fill=\"rgb(" << red << ",0," << blue << ")\"/>\n";
    }
    out << "<text x=\"" << margin_left - 8.0 << "\" y=\"" << margin_top + cell_h * (static_cast<double>(r) + 0.65)
        << "\" text-anchor=\"end\" font-size=\"13\" font-family=\"sans-serif\">" << trace.columns[r]
        << "</text>\n";
  }
  out << "<text x=\"" << margin_left << "\" y=\"" << height - 12.0
      << "\" font-size=\"13\" font-family=\"sans-serif\">epoch " << trace.rows.front().epoch << "</text>\n";
  out << "<text x=\"" << margin_left + cell_w * static_cast<double>(n_cols) << "\" y=\"" << height - 12.0
      << "\" text-anchor=\"end\" font-size=\"13\" font-family=\"sans-serif\">epoch " << trace.rows.back().epoch
      << "</text>\n";
  out << "<text x=\"" << margin_left << "\" y=\"" << margin_top - 8.0
      << "\" font-size=\"13\" font-family=\"sans-serif\">red: low error, blue: high error</text>\n";
  out << "</svg>\n";
  if (!out) throw Error(Errc::IoError, "write failed: " + path);
}

int first_epoch_below(const Trace& trace, const std::string& column, double threshold) {
  const auto it = std::find(trace.columns.begin(), trace.columns.end(), column);
  if (it == trace.columns.end()) throw Error(Errc::ConfigError, "first_epoch_below: no column " + column);
  const std::size_t idx = static_cast<std::size_t>(it - trace.columns.begin());
  for (const auto& row : trace.rows)
    if (row.values[idx] < threshold) return row.epoch;
  return -1;
}

namespace {

struct Probe {
  // fills columns; returns per-epoch values
  std::vector<std::string> columns;
  std::function<std::vector<double>(std::span<const double> theta)> values;
};

mlp::Dataset build_dataset(const FullConfig& cfg) {
  const auto& e = cfg.experiment;
  switch (e.target) {
    case TargetId::Sin1_3:
    case TargetId::Sin1_3_5:
      return build_1d_dataset(e.target, e.samples > 0 ? e.samples : 201);
    case TargetId::MnistSubset: {
      if (e.mnist_images.empty() || e.mnist_labels.empty())
        throw Error(Errc::ConfigError, "mnist_subset target needs mnist_images and mnist_labels paths");
      const auto full = load_idx(e.mnist_images, e.mnist_labels);
      const std::size_t count = e.samples > 0 ? static_cast<std::size_t>(e.samples) : 550;
      return subsample(full, std::min<std::size_t>(count, full.n), mix_seed(e.seed, kTagSubsample));
    }
    case TargetId::SyntheticClusters: {
      const std::size_t count = e.samples > 0 ? static_cast<std::size_t>(e.samples) : 550;
      return make_cluster_dataset(count, 20, 10, mix_seed(e.seed, kTagClusters));
    }
  }
  throw Error(Errc::ConfigError, "unhandled target");
}

opt::RunResult dispatch_optimizer(const FullConfig& cfg, const Objective& obj, ParamVector theta0,
                                  const opt::RunCallback& callback) {
  const auto& e = cfg.experiment;
  const auto& p = cfg.params;
  opt::StoppingRule stop{e.epsilon, e.epochs, e.stall_window};
  if (e.optimizer == "gd") {
    opt::GdOptions o;
    o.callback = callback;
    return opt::gd_run(obj, std::move(theta0), p.step_size, stop, o);
  }
  if (e.optimizer == "cg") {
    opt::CgOptions o;
    o.callback = callback;
    return opt::cg_run(obj, std::move(theta0), stop, o);
  }
  if (e.optimizer == "tnc") {
    opt::TncOptions o;
    o.callback = callback;
    o.inner_cap = p.inner_cap;
    if (p.eta >= 0.0) o.eta_rule = [eta = p.eta](double) { return eta; };
    return opt::tnc_run(obj, std::move(theta0), stop, o);
  }
  if (e.optimizer == "bfgs") {
    opt::BfgsOptions o;
    o.callback = callback;
    return opt::bfgs_run(obj, std::move(theta0), stop, o);
  }
  if (e.optimizer == "lbfgs") {
    opt::LbfgsOptions o;
    o.callback = callback;
    return opt::lbfgs_run(obj, std::move(theta0), p.memory, stop, o);
  }
  if (e.optimizer == "powell") {
    opt::PowellOptions o;
    o.callback = callback;
    o.golden_tol = p.golden_tol;
    return opt::powell_run(obj, std::move(theta0), stop, o);
  }
  if (e.optimizer == "pso") {
    opt::SwarmConfig o;
    o.callback = callback;
    o.init_width = p.init_width;
    o.max_swarm = p.max_swarm;
    o.seed = mix_seed(e.seed, kTagPso);
    return opt::pso_run(obj, std::move(theta0), o, stop);
  }
  if (e.optimizer == "mc") {
    opt::McConfig o;
    o.callback = callback;
    o.delta = p.mc_delta;
    o.n_samples = p.mc_samples;
    o.seed = mix_seed(e.seed, kTagMc);
    return opt::mc_run(obj, std::move(theta0), o, stop);
  }
  throw Error(Errc::ConfigError, "unknown optimizer: " + e.optimizer);
}

bool spectral_target(TargetId t) { return t == TargetId::Sin1_3 || t == TargetId::Sin1_3_5; }

}  // namespace

RunArtifacts run_experiment(const FullConfig& cfg) {
  const auto& e = cfg.experiment;
  const mlp::Dataset data = build_dataset(cfg);

  mlp::MlpSpec spec{e.widths};
  mlp::validate(spec, data);  // widths must match the target's dimensions

  fs::create_directories(e.out_dir);
  RunArtifacts art;
  art.fingerprint = fingerprint(cfg);
  const std::string stem = (fs::path(e.out_dir) / e.name).string();
  art.trace_csv = stem + "_trace.csv";
  art.summary_json = stem + "_summary.json";
  art.heatmap_svg = stem + "_heatmap.svg";

  try {
    const ParamVector theta0 = mlp::init_params(spec, e.seed);
    const Objective obj = mlp::make_mse_objective(spec, data);

    Trace trace;
    std::vector<std::size_t> tracked;
    std::vector<spectrum::GaussianFilter> filters;
    spectrum::SpectrumView target_spec;

    if (spectral_target(e.target)) {
      target_spec = spectrum::dft(data.targets);
      tracked = spectrum::select_peak_frequencies(target_spec, e.peak_threshold);
      // k = 0 carries the mean; it is kept only when the target really has one
      for (std::size_t k : tracked) trace.columns.push_back("delta_k" + std::to_string(k));
    } else {
      for (double d : e.deltas) filters.emplace_back(data.inputs, data.n, data.in_dim, d);
      for (double d : e.deltas) {
        trace.columns.push_back("e_low_d" + format_delta(d));
        trace.columns.push_back("e_high_d" + format_delta(d));
      }
    }

    std::vector<double> outputs(data.n * data.out_dim);
    const auto probe = [&](int epoch, std::span<const double> theta) {
      if (epoch % e.record_every != 0) return;
      Trace::Row row;
      row.epoch = epoch;
      row.loss = mlp::mse_loss(spec, theta, data);
      mlp::batch_outputs(spec, theta, data, outputs);
      if (spectral_target(e.target)) {
        const auto out_spec = spectrum::dft(outputs);
        for (std::size_t k : tracked)
          row.values.push_back(spectrum::relative_spectral_error(target_spec, out_spec, k));
      } else {
        for (const auto& f : filters) {
          const auto err = spectrum::filter_errors(f, data.targets, outputs, data.out_dim);
          row.values.push_back(err.e_low);
          row.values.push_back(err.e_high);
        }
      }
      trace.rows.push_back(std::move(row));
    };

    const opt::RunResult result = dispatch_optimizer(cfg, obj, theta0, probe);

    emit_csv(trace, art.trace_csv);
    emit_heatmap_svg(trace, art.heatmap_svg);

    json summary;
    summary["name"] = e.name;
    summary["optimizer"] = e.optimizer;
    summary["target"] = target_name(e.target);
    summary["seed"] = e.seed;
    summary["fingerprint"] = art.fingerprint;
    summary["termination"] = opt::term_status_name(result.status);
    summary["epochs_run"] = result.reports.back().epoch;
    summary["final_loss"] = result.reports.back().loss;
    summary["eval_count"] = obj.eval_count();
    summary["gradient_count"] = obj.gradient_count();
    summary["trace_csv"] = art.trace_csv;
    summary["heatmap_svg"] = art.heatmap_svg;
    if (spectral_target(e.target)) {
      summary["tracked_frequencies"] = tracked;
      json conv;
      for (double thr : {0.2, 0.3, 0.4}) {
        json per_k;
        for (std::size_t k : tracked) {
          const int epoch = first_epoch_below(trace, "delta_k" + std::to_string(k), thr);
          per_k[std::to_string(k)] = epoch < 0 ? json(nullptr) : json(epoch);
        }
        conv[format_delta(thr)] = per_k;
      }
      summary["convergence_epochs"] = conv;
    } else {
      summary["deltas"] = e.deltas;
      json frac;
      for (std::size_t fi = 0; fi < e.deltas.size(); ++fi) {
        std::size_t considered = 0, low_wins = 0;
        for (const auto& row : trace.rows) {
          if (row.epoch <= 5) continue;
          ++considered;
          if (row.values[2 * fi] < row.values[2 * fi + 1]) ++low_wins;
        }
        frac[format_delta(e.deltas[fi])] =
            considered == 0 ? json(nullptr) : json(static_cast<double>(low_wins) / static_cast<double>(considered));
      }
      summary["elow_lt_ehigh_fraction_after5"] = frac;
    }
    std::ofstream out(art.summary_json, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write: " + art.summary_json);
    out << summary.dump(2) << '\n';
    if (!out) throw Error(Errc::IoError, "write failed: " + art.summary_json);
  } catch (...) {
    // no partial artifacts on failure
    std::error_code ec;
    fs::remove(art.trace_csv, ec);
    fs::remove(art.summary_json, ec);
    fs::remove(art.heatmap_svg, ec);
    throw;
  }
  return art;
}

json sweep(const FullConfig& base, int n_seeds, std::uint64_t base_seed) {
  if (n_seeds < 1) throw Error(Errc::ConfigError, "sweep: need at least one seed");
  json out;
  out["config"] = config_to_json(base);
  out["seeds"] = json::array();
  out["per_seed"] = json::array();

  const bool spectral = spectral_target(base.experiment.target);
  std::map<std::string, int> ordering_ok;  // threshold -> satisfied count

  for (int s = 0; s < n_seeds; ++s) {
    FullConfig cfg = base;
    cfg.experiment.seed = base_seed + static_cast<std::uint64_t>(s);
    cfg.experiment.name = base.experiment.name + "_seed" + std::to_string(cfg.experiment.seed);
    const RunArtifacts art = run_experiment(cfg);
    out["seeds"].push_back(cfg.experiment.seed);

    std::ifstream in(art.summary_json);
    json summary;
    in >> summary;
    json entry;
    entry["seed"] = cfg.experiment.seed;
    entry["final_loss"] = summary["final_loss"];
    entry["termination"] = summary["termination"];
    entry["trace_csv"] = art.trace_csv;

    if (spectral) {
      entry["convergence_epochs"] = summary["convergence_epochs"];
      for (const auto& [thr, per_k] : summary["convergence_epochs"].items()) {
        // non-decreasing first-crossing epochs over ascending k, lowest k finite
        std::vector<std::pair<std::size_t, json>> items;
        for (const auto& [k, v] : per_k.items()) items.emplace_back(std::stoul(k), v);
        std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        bool ok = !items.empty() && !items.front().second.is_null();
        long long prev = -1;
        for (const auto& [k, v] : items) {
          if (!ok) break;
          const long long cur = v.is_null() ? std::numeric_limits<long long>::max() : v.get<long long>();
          if (cur < prev) ok = false;
          prev = cur;
        }
        entry["ordering_ok"][thr] = ok;
        if (ok) ordering_ok[thr] += 1;
      }
    } else {
      entry["elow_lt_ehigh_fraction_after5"] = summary["elow_lt_ehigh_fraction_after5"];
    }
    out["per_seed"].push_back(std::move(entry));
  }
  if (spectral) {
    json agg;
    for (const auto& [thr, count] : ordering_ok) {
      agg[thr]["satisfied"] = count;
      agg[thr]["total"] = n_seeds;
    }
    out["ordering"] = agg;
  }
  return out;
}

}  // namespace freqlab::harness
