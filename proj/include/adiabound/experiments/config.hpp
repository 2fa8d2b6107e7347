#pragma once

// Experiment configuration. JSON on disk; every object rejects unknown keys.
// See configs/README.md for the schema.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "adiabound/errors.hpp"
#include "adiabound/evolution/schedule.hpp"
#include "adiabound/tsp/effective_length.hpp"
#include "adiabound/tsp/parse.hpp"

namespace adiabound::experiments {

using nlohmann::json;

enum class ExperimentKind { grover_sweep, tsp_run, bound_audit, sigma_scan, gap_scan, fraction_decay };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::grover_sweep: return "grover-sweep";
    case ExperimentKind::tsp_run: return "tsp-run";
    case ExperimentKind::bound_audit: return "bound-audit";
    case ExperimentKind::sigma_scan: return "sigma-scan";
    case ExperimentKind::gap_scan: return "gap-scan";
    case ExperimentKind::fraction_decay: return "fraction-decay";
  }
  return "?";
}

inline ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::grover_sweep, ExperimentKind::tsp_run, ExperimentKind::bound_audit,
                 ExperimentKind::sigma_scan, ExperimentKind::gap_scan, ExperimentKind::fraction_decay}) {
    if (s == to_string(k)) return k;
  }
  throw InvalidArgument("unknown experiment '" + s + "'");
}

inline const std::set<std::string>& model_names() {
  static const std::set<std::string> names{"grover", "tsp-rank", "tsp-tuple", "tsp-finite"};
  return names;
}

struct ModelConfig {
  std::string model = "grover";
  /// N for grover, M (city count) for the TSP models.
  std::vector<std::size_t> sizes{4};
  std::size_t marked = 0;
  double alpha_scale = 1.0;
  std::optional<std::size_t> n_max_override;
  std::string dsq_policy = "parity";
  double sigma_d = 1.0;
  std::uint64_t seed = 0;
  /// Instances drawn per size when no instance file is given.
  std::size_t instances = 1;
  std::optional<std::string> instance_path;
  std::string instance_format = "tsplib";
  double distance_low = 0.0;
  double distance_high = 1.0;

  tsp::DsqPolicy policy() const {
    if (dsq_policy == "parity") return tsp::DsqPolicy::parity();
    return tsp::DsqPolicy::random(sigma_d, seed);
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct TimeConfig {
  std::vector<double> values;            ///< absolute durations
  std::vector<double> t_min_multipliers; ///< durations as multiples of t_min
  friend bool operator==(const TimeConfig&, const TimeConfig&) = default;
};

struct StepConfig {
  double step_bound_factor = 0.1;
  double norm_tol = 1e-8;
  std::size_t samples_per_run = 64;
  std::optional<double> fixed_step;
  bool renormalize = false;
  friend bool operator==(const StepConfig&, const StepConfig&) = default;
};

struct ScanConfig {
  std::size_t M_min = 5;
  std::size_t M_max = 9;
  std::size_t samples = 200;
  std::size_t grid_size = 201;
  std::size_t refine_rounds = 3;
  friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::grover_sweep;
  ModelConfig model;
  std::string schedule = "linear";
  TimeConfig time{{}, {1.0}};
  StepConfig step;
  ScanConfig scan;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw InvalidArgument(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument(where + "." + key + ": wrong type");
  }
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v, where);
  out = v;
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace detail

inline json to_json(const ExperimentConfig& c) {
  const auto& m = c.model;
  return {
      {"experiment", to_string(c.experiment)},
      {"model",
       {{"model", m.model},
        {"sizes", m.sizes},
        {"marked", m.marked},
        {"alpha_scale", m.alpha_scale},
        {"n_max_override", detail::opt(m.n_max_override)},
        {"dsq_policy", m.dsq_policy},
        {"sigma_d", m.sigma_d},
        {"seed", m.seed},
        {"instances", m.instances},
        {"instance_path", detail::opt(m.instance_path)},
        {"instance_format", m.instance_format},
        {"distance_low", m.distance_low},
        {"distance_high", m.distance_high}}},
      {"schedule", c.schedule},
      {"time", {{"values", c.time.values}, {"t_min_multipliers", c.time.t_min_multipliers}}},
      {"step",
       {{"step_bound_factor", c.step.step_bound_factor},
        {"norm_tol", c.step.norm_tol},
        {"samples_per_run", c.step.samples_per_run},
        {"fixed_step", detail::opt(c.step.fixed_step)},
        {"renormalize", c.step.renormalize}}},
      {"scan",
       {{"M_min", c.scan.M_min},
        {"M_max", c.scan.M_max},
        {"samples", c.scan.samples},
        {"grid_size", c.scan.grid_size},
        {"refine_rounds", c.scan.refine_rounds}}},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir},
  };
}

/// Structural checks only; budgets are checked by validate_budgets.
inline ExperimentConfig config_from_json(const json& j) {
  detail::check_keys(j, "config", {"experiment", "model", "schedule", "time", "step", "scan", "seeds", "output_dir"});
  ExperimentConfig c;
  if (!j.contains("experiment")) throw InvalidArgument("config: missing 'experiment'");
  std::string kind;
  detail::read(j, "experiment", kind, "config");
  c.experiment = experiment_kind_from_string(kind);

  if (j.contains("model")) {
    const json& m = j.at("model");
    detail::check_keys(m, "model",
                       {"model", "sizes", "marked", "alpha_scale", "n_max_override", "dsq_policy", "sigma_d", "seed",
                        "instances", "instance_path", "instance_format", "distance_low", "distance_high"});
    auto& o = c.model;
    detail::read(m, "model", o.model, "model");
    detail::read(m, "sizes", o.sizes, "model");
    detail::read(m, "marked", o.marked, "model");
    detail::read(m, "alpha_scale", o.alpha_scale, "model");
    detail::read(m, "n_max_override", o.n_max_override, "model");
    detail::read(m, "dsq_policy", o.dsq_policy, "model");
    detail::read(m, "sigma_d", o.sigma_d, "model");
    detail::read(m, "seed", o.seed, "model");
    detail::read(m, "instances", o.instances, "model");
    detail::read(m, "instance_path", o.instance_path, "model");
    detail::read(m, "instance_format", o.instance_format, "model");
    detail::read(m, "distance_low", o.distance_low, "model");
    detail::read(m, "distance_high", o.distance_high, "model");
    if (!model_names().contains(o.model)) throw InvalidArgument("model.model: unknown model '" + o.model + "'");
    if (o.dsq_policy != "parity" && o.dsq_policy != "random") {
      throw InvalidArgument("model.dsq_policy: expected 'parity' or 'random'");
    }
    tsp::format_from_string(o.instance_format);
  }
  detail::read(j, "schedule", c.schedule, "config");
  evolution::schedule_kind_from_string(c.schedule);

  if (j.contains("time")) {
    const json& t = j.at("time");
    detail::check_keys(t, "time", {"values", "t_min_multipliers"});
    c.time = {};
    detail::read(t, "values", c.time.values, "time");
    detail::read(t, "t_min_multipliers", c.time.t_min_multipliers, "time");
  }
  if (j.contains("step")) {
    const json& s = j.at("step");
    detail::check_keys(s, "step", {"step_bound_factor", "norm_tol", "samples_per_run", "fixed_step", "renormalize"});
    detail::read(s, "step_bound_factor", c.step.step_bound_factor, "step");
    detail::read(s, "norm_tol", c.step.norm_tol, "step");
    detail::read(s, "samples_per_run", c.step.samples_per_run, "step");
    detail::read(s, "fixed_step", c.step.fixed_step, "step");
    detail::read(s, "renormalize", c.step.renormalize, "step");
  }
  if (j.contains("scan")) {
    const json& s = j.at("scan");
    detail::check_keys(s, "scan", {"M_min", "M_max", "samples", "grid_size", "refine_rounds"});
    detail::read(s, "M_min", c.scan.M_min, "scan");
    detail::read(s, "M_max", c.scan.M_max, "scan");
    detail::read(s, "samples", c.scan.samples, "scan");
    detail::read(s, "grid_size", c.scan.grid_size, "scan");
    detail::read(s, "refine_rounds", c.scan.refine_rounds, "scan");
  }
  detail::read(j, "seeds", c.seeds, "config");
  detail::read(j, "output_dir", c.output_dir, "config");
  return c;
}

inline std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

inline ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("config: ") + e.what());
  }
  return config_from_json(j);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace adiabound::experiments
