#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "freqlab/mlp.hpp"

#include "json.hpp"

namespace freqlab::harness {

enum class TargetId { Sin1_3, Sin1_3_5, MnistSubset, SyntheticClusters };

const char* target_name(TargetId t);
TargetId target_from_name(const std::string& name);

// Knobs specific to one optimizer; unrelated fields are ignored.
struct OptimizerParams {
  double step_size = 0.1;        // gd
  int memory = 10;               // lbfgs
  double eta = -1.0;             // tnc forcing term; < 0 means min(0.5, sqrt(|g|))
  int inner_cap = 0;             // tnc inner iteration cap; 0 means min(P, 40)
  double golden_tol = 1e-4;      // powell
  double init_width = 0.5;       // pso particle spread
  std::size_t max_swarm = 5000;  // pso budget
  double mc_delta = 0.05;        // monte-carlo proposal stddev
  int mc_samples = 100;          // monte-carlo candidates per iteration
};

struct ExperimentConfig {
  std::string name = "run";
  TargetId target = TargetId::Sin1_3;
  std::vector<int> widths = {1, 100, 10, 1};
  std::string optimizer = "cg";  // gd | cg | tnc | bfgs | lbfgs | powell | pso | mc
  std::uint64_t seed = 1;
  int epochs = 2000;
  int record_every = 1;
  double epsilon = 1e-6;
  int stall_window = 20;
  int samples = 0;  // 0: target default (201 for 1-d, 550 for the subset targets)
  double peak_threshold = 0.1;
  std::vector<double> deltas = {2.0, 7.0};  // filter variances for high-dimensional targets
  std::string mnist_images, mnist_labels;
  std::string out_dir = "out";
};

struct FullConfig {
  ExperimentConfig experiment;
  OptimizerParams params;
};

nlohmann::json config_to_json(const FullConfig& cfg);
FullConfig config_from_json(const nlohmann::json& j);
FullConfig config_from_file(const std::string& path);

// Stable hash of the semantically meaningful fields plus the seed; the output
// location and run name do not participate.
std::uint64_t fingerprint(const FullConfig& cfg);

// Evenly spaced grid on [-3.14, 3.14], both endpoints included, with the
// target evaluated exactly at the grid points.
mlp::Dataset build_1d_dataset(TargetId target, int n);

double target_value(TargetId target, double x);

// Big-endian IDX files; pixels scaled to [0,1], labels one-hot over 10 classes.
mlp::Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Uniform sample without replacement, deterministic per seed.
mlp::Dataset subsample(const mlp::Dataset& data, std::size_t count, std::uint64_t seed);

// Seeded stand-in for the image subset: `classes` Gaussian clusters in
// `dim` dimensions with one-hot labels.
mlp::Dataset make_cluster_dataset(std::size_t n, std::size_t dim, std::size_t classes, std::uint64_t seed);

struct Trace {
  std::vector<std::string> columns;  // value columns after epoch and loss
  struct Row {
    int epoch;
    double loss;
    std::vector<double> values;
  };
  std::vector<Row> rows;
};

void emit_csv(const Trace& trace, const std::string& path);
Trace parse_csv(const std::string& path);

// Column-by-epoch raster; cell color runs red (value 0) to blue (value >= 1).
void emit_heatmap_svg(const Trace& trace, const std::string& path);

// First recorded epoch with trace[column] < threshold, or -1 if none.
int first_epoch_below(const Trace& trace, const std::string& column, double threshold);

struct RunArtifacts {
  std::string trace_csv;
  std::string summary_json;
  std::string heatmap_svg;
  std::uint64_t fingerprint = 0;
};

RunArtifacts run_experiment(const FullConfig& cfg);

// Runs the same experiment under seeds base_seed .. base_seed+n_seeds-1 and
// aggregates the per-frequency convergence ordering (or the filter-error
// comparison for high-dimensional targets).
nlohmann::json sweep(const FullConfig& base, int n_seeds, std::uint64_t base_seed);

}  // namespace freqlab::harness
