// Command-line front end; talks to the core exclusively through the C API.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "freqlab.h"

namespace {

int fail(freqlab_status status) {
  std::fprintf(stderr, "error: %s\n", freqlab_last_error());
  return static_cast<int>(status);
}

// Shared experiment flags; only explicitly passed options enter the config
// JSON so file-based configs keep their values.
struct ExperimentFlags {
  std::string config_path;
  std::string target;
  std::vector<int> widths;
  std::string optimizer;
  std::uint64_t seed = 0;
  int epochs = -1;
  int record_every = -1;
  std::string out_dir;
  std::vector<double> deltas;
  std::string mnist_images, mnist_labels;
  std::string name;
  double epsilon = -1.0;
  int samples = -1;

  CLI::App* attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON config file; flags override its fields");
    app.add_option("--target", target, "sin1_3 | sin1_3_5 | mnist_subset | synthetic_clusters");
    app.add_option("--widths", widths, "layer widths, e.g. --widths 1 100 10 1");
    app.add_option("--optimizer", optimizer, "gd | cg | tnc | bfgs | lbfgs | powell | pso | mc");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--epochs", epochs, "outer iteration cap");
    app.add_option("--record-every", record_every, "epochs between spectral probes");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--delta", deltas, "filter variance, repeatable")->expected(-1);
    app.add_option("--mnist-images", mnist_images, "IDX image file");
    app.add_option("--mnist-labels", mnist_labels, "IDX label file");
    app.add_option("--name", name, "run name used in artifact file names");
    app.add_option("--epsilon", epsilon, "stopping tolerance");
    app.add_option("--samples", samples, "sample count override");
    return &app;
  }

  std::string to_json(const CLI::App& app) const {
    nlohmann::json j;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot open config file: " + config_path);
      in >> j;
    }
    if (app.count("--target")) j["target"] = target;
    if (app.count("--widths")) j["widths"] = widths;
    if (app.count("--optimizer")) j["optimizer"] = optimizer;
    if (app.count("--seed")) j["seed"] = seed;
    if (app.count("--epochs")) j["epochs"] = epochs;
    if (app.count("--record-every")) j["record_every"] = record_every;
    if (app.count("--out")) j["out_dir"] = out_dir;
    if (app.count("--delta")) j["deltas"] = deltas;
    if (app.count("--mnist-images")) j["mnist_images"] = mnist_images;
    if (app.count("--mnist-labels")) j["mnist_labels"] = mnist_labels;
    if (app.count("--name")) j["name"] = name;
    if (app.count("--epsilon")) j["epsilon"] = epsilon;
    if (app.count("--samples")) j["samples"] = samples;
    return j.dump();
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"freqlab: classical-optimizer training runs with per-frequency convergence traces"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "evaluation threads (default: hardware)");

  ExperimentFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment and write its artifacts");
  run_flags.attach(*run_cmd);

  ExperimentFlags sweep_flags;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a seed sweep and report ordering statistics");
  sweep_flags.attach(*sweep_cmd);
  int n_seeds = 5;
  std::uint64_t base_seed = 1;
  std::string sweep_out;
  sweep_cmd->add_option("--seeds", n_seeds, "number of seeds");
  sweep_cmd->add_option("--base-seed", base_seed, "first seed");
  sweep_cmd->add_option("--summary", sweep_out, "write the sweep summary JSON here (default: stdout)");

  CLI::App* plot_cmd = app.add_subcommand("plot", "regenerate a heatmap SVG from a trace CSV");
  std::string csv_path, svg_path;
  plot_cmd->add_option("--csv", csv_path, "trace CSV")->required();
  plot_cmd->add_option("--svg", svg_path, "output SVG")->required();

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the invariant battery on synthetic objectives");

  CLI11_PARSE(app, argc, argv);

  if (app.count("--threads")) freqlab_set_threads(threads);

  try {
    if (run_cmd->parsed()) {
      freqlab_experiment* exp = freqlab_experiment_new_json(run_flags.to_json(*run_cmd).c_str());
      if (!exp) return fail(FREQLAB_ERR_CONFIG);
      const freqlab_status status = freqlab_experiment_run(exp);
      if (status != FREQLAB_OK) {
        freqlab_experiment_free(exp);
        return fail(status);
      }
      std::printf("trace:   %s\nsummary: %s\nheatmap: %s\nfingerprint: %016llx\n",
                  freqlab_experiment_trace_path(exp), freqlab_experiment_summary_path(exp),
                  freqlab_experiment_heatmap_path(exp),
                  static_cast<unsigned long long>(freqlab_experiment_fingerprint(exp)));
      freqlab_experiment_free(exp);
      return 0;
    }
    if (sweep_cmd->parsed()) {
      char* summary = nullptr;
      const freqlab_status status =
          freqlab_sweep_json(sweep_flags.to_json(*sweep_cmd).c_str(), n_seeds, base_seed, &summary);
      if (status != FREQLAB_OK) return fail(status);
      if (sweep_out.empty()) {
        std::printf("%s\n", summary);
      } else {
        std::ofstream out(sweep_out);
        out << summary << '\n';
        std::printf("sweep summary: %s\n", sweep_out.c_str());
      }
      freqlab_string_free(summary);
      return 0;
    }
    if (plot_cmd->parsed()) {
      const freqlab_status status = freqlab_plot_csv(csv_path.c_str(), svg_path.c_str());
      if (status != FREQLAB_OK) return fail(status);
      std::printf("heatmap: %s\n", svg_path.c_str());
      return 0;
    }
    if (verify_cmd->parsed()) {
      char* report = nullptr;
      const freqlab_status status = freqlab_verify(&report);
      if (report) {
        std::fputs(report, stdout);
        freqlab_string_free(report);
      }
      return status == FREQLAB_OK ? 0 : static_cast<int>(status);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
