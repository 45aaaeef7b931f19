#include "freqlab.h"

#include <cstring>
#include <string>

#include "freqlab/harness.hpp"
#include "freqlab/threads.hpp"
#include "freqlab/verify.hpp"

using freqlab::Errc;
using freqlab::Error;

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

freqlab_status status_from(const Error& e) {
  switch (e.code()) {
    case Errc::ConfigError:
    case Errc::BadMagic:
    case Errc::TruncatedFile:
    case Errc::CountMismatch:
    case Errc::CountTooLarge:
    case Errc::DimensionMismatch:
      return FREQLAB_ERR_CONFIG;
    default:
      return FREQLAB_ERR_RUNTIME;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct freqlab_experiment {
  freqlab::harness::FullConfig config;
  freqlab::harness::RunArtifacts artifacts;
  bool ran = false;
};

extern "C" {

const char* freqlab_version(void) { return "1.0.0"; }

void freqlab_set_threads(int n) { freqlab::set_thread_count(n < 1 ? 0 : n); }

const char* freqlab_last_error(void) { return g_last_error.c_str(); }

freqlab_experiment* freqlab_experiment_new_json(const char* json_text) {
  if (!json_text) {
    set_error("null config text");
    return nullptr;
  }
  try {
    const auto j = nlohmann::json::parse(json_text);
    auto* exp = new freqlab_experiment;
    exp->config = freqlab::harness::config_from_json(j);
    return exp;
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

freqlab_experiment* freqlab_experiment_new_file(const char* path) {
  if (!path) {
    set_error("null config path");
    return nullptr;
  }
  try {
    auto* exp = new freqlab_experiment;
    exp->config = freqlab::harness::config_from_file(path);
    return exp;
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

void freqlab_experiment_free(freqlab_experiment* exp) { delete exp; }

freqlab_status freqlab_experiment_run(freqlab_experiment* exp) {
  if (!exp) {
    set_error("null experiment handle");
    return FREQLAB_ERR_CONFIG;
  }
  try {
    exp->artifacts = freqlab::harness::run_experiment(exp->config);
    exp->ran = true;
    return FREQLAB_OK;
  } catch (const Error& e) {
    set_error(e.what());
    return status_from(e);
  } catch (const std::exception& e) {
    set_error(e.what());
    return FREQLAB_ERR_RUNTIME;
  }
}

const char* freqlab_experiment_trace_path(const freqlab_experiment* exp) {
  return exp && exp->ran ? exp->artifacts.trace_csv.c_str() : nullptr;
}

const char* freqlab_experiment_summary_path(const freqlab_experiment* exp) {
  return exp && exp->ran ? exp->artifacts.summary_json.c_str() : nullptr;
}

const char* freqlab_experiment_heatmap_path(const freqlab_experiment* exp) {
  return exp && exp->ran ? exp->artifacts.heatmap_svg.c_str() : nullptr;
}

uint64_t freqlab_experiment_fingerprint(const freqlab_experiment* exp) {
  return exp ? freqlab::harness::fingerprint(exp->config) : 0;
}

freqlab_status freqlab_sweep_json(const char* json_text, int n_seeds, uint64_t base_seed,
                                  char** summary_json_out) {
  if (!json_text) {
    set_error("null config text");
    return FREQLAB_ERR_CONFIG;
  }
  try {
    const auto cfg = freqlab::harness::config_from_json(nlohmann::json::parse(json_text));
    const auto summary = freqlab::harness::sweep(cfg, n_seeds, base_seed);
    if (summary_json_out) *summary_json_out = dup_string(summary.dump(2));
    return FREQLAB_OK;
  } catch (const Error& e) {
    set_error(e.what());
    return status_from(e);
  } catch (const std::exception& e) {
    set_error(e.what());
    return FREQLAB_ERR_CONFIG;
  }
}

freqlab_status freqlab_plot_csv(const char* csv_path, const char* svg_path) {
  if (!csv_path || !svg_path) {
    set_error("null path");
    return FREQLAB_ERR_CONFIG;
  }
  try {
    const auto trace = freqlab::harness::parse_csv(csv_path);
    freqlab::harness::emit_heatmap_svg(trace, svg_path);
    return FREQLAB_OK;
  } catch (const Error& e) {
    set_error(e.what());
    return status_from(e);
  } catch (const std::exception& e) {
    set_error(e.what());
    return FREQLAB_ERR_RUNTIME;
  }
}

freqlab_status freqlab_verify(char** report_out) {
  try {
    const auto report = freqlab::verify::run_battery();
    if (report_out) *report_out = dup_string(freqlab::verify::render_text(report));
    return report.all_passed() ? FREQLAB_OK : FREQLAB_ERR_VERIFY;
  } catch (const std::exception& e) {
    set_error(e.what());
    return FREQLAB_ERR_RUNTIME;
  }
}

void freqlab_string_free(char* s) { std::free(s); }

}  // extern "C"
