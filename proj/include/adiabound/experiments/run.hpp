#pragma once

// Experiment driver. Independent cells run on a bounded worker pool and write
// cells/cell-<index>.json; the manifest and tables are assembled afterwards in
// config order, so outputs do not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "adiabound/bounds/bounds.hpp"
#include "adiabound/bounds/gap.hpp"
#include "adiabound/bounds/report_io.hpp"
#include "adiabound/errors.hpp"
#include "adiabound/evolution/evolve.hpp"
#include "adiabound/evolution/schedule.hpp"
#include "adiabound/experiments/config.hpp"
#include "adiabound/experiments/io.hpp"
#include "adiabound/models/models.hpp"
#include "adiabound/tsp/parse.hpp"
#include "adiabound/tsp/statistics.hpp"

#ifndef ADIABOUND_VERSION
#define ADIABOUND_VERSION "0.0.0"
#endif

namespace adiabound::experiments {

/// Plot-ready series: first column is x, the rest are y values.
struct Series {
  std::string name;
  std::string description;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct RunManifest {
  ExperimentConfig config;
  std::string version = ADIABOUND_VERSION;
  double wall_clock_seconds = 0.0;
  json outputs = json::array();
  Table table;
  std::vector<Series> series;
  std::string content_hash;  ///< sha256 of the serialized outputs
  std::size_t violations = 0;
};

inline json to_json(const RunManifest& m) {
  json series = json::array();
  for (const auto& s : m.series) series.push_back({{"name", s.name}, {"columns", s.columns}, {"points", s.rows.size()}});
  return {{"config", to_json(m.config)},
          {"version", m.version},
          {"wall_clock_seconds", m.wall_clock_seconds},
          {"outputs", m.outputs},
          {"series", series},
          {"content_hash", m.content_hash},
          {"violations", m.violations}};
}

/// --threads, then ADIABOUND_THREADS, then the hardware concurrency.
inline unsigned resolve_threads(std::optional<unsigned> cli) {
  if (cli && *cli > 0) return *cli;
  if (const char* env = std::getenv("ADIABOUND_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline constexpr std::size_t kMaxEvolveDim = std::size_t{1} << 16;
inline constexpr std::size_t kMaxCells = 100000;

namespace detail {

inline bool is_tsp(const ModelConfig& m) { return m.model != "grover"; }

inline std::size_t model_dim(const ModelConfig& m, std::size_t size) {
  if (m.model == "grover") return size;
  if (m.model == "tsp-finite") return static_cast<std::size_t>(tsp::tuple_count(size));
  if (m.model == "tsp-rank") {
    const double a = m.alpha_scale * std::sqrt(static_cast<double>(tsp::factorial(size)));
    return (m.n_max_override ? *m.n_max_override : hilbert::default_n_max({a, 0.0})) + 1;
  }
  const double a = m.alpha_scale * std::sqrt(static_cast<double>(size));
  const std::size_t per = (m.n_max_override ? *m.n_max_override : hilbert::default_n_max({a, 0.0})) + 1;
  return static_cast<std::size_t>(std::pow(static_cast<double>(per), static_cast<double>(size)));
}

inline std::size_t model_limit(const std::string& model) {
  if (model == "tsp-rank") return models::kMaxRankCities;
  if (model == "tsp-tuple") return models::kMaxTupleCities;
  if (model == "tsp-finite") return models::kMaxFiniteCities;
  return models::kMaxGroverItems;
}

inline std::optional<tsp::TspInstance> file_instance(const ModelConfig& m) {
  if (!m.instance_path) return std::nullopt;
  return tsp::load_instance(*m.instance_path, tsp::format_from_string(m.instance_format));
}

inline std::vector<std::size_t> effective_sizes(const ModelConfig& m) {
  if (auto inst = file_instance(m)) return {inst->size()};
  return m.sizes;
}

}  // namespace detail

/// Dry-run checks: instance file readable, sizes and dimensions within budgets.
inline void validate_budgets(const ExperimentConfig& c) {
  const auto& m = c.model;
  if (m.instance_path && !std::filesystem::exists(*m.instance_path)) {
    throw InvalidArgument("instance file '" + *m.instance_path + "' does not exist");
  }
  if (m.dsq_policy == "random" && !(m.sigma_d > 0.0)) throw InvalidArgument("model.sigma_d must be positive");
  if (!(m.alpha_scale >= 0.0) || !std::isfinite(m.alpha_scale)) throw InvalidArgument("model.alpha_scale must be >= 0");
  if (m.instances < 1) throw InvalidArgument("model.instances must be >= 1");
  if (c.seeds.empty()) throw InvalidArgument("seeds must not be empty");
  tsp::DistanceSampler::uniform(m.distance_low, m.distance_high);

  switch (c.experiment) {
    case ExperimentKind::sigma_scan:
      if (c.scan.M_min < 2 || c.scan.M_max < c.scan.M_min) throw InvalidArgument("scan: need 2 <= M_min <= M_max");
      tsp::require_enumerable(c.scan.M_max, "sigma-scan");
      if (c.scan.samples < 1) throw InvalidArgument("scan.samples must be >= 1");
      return;
    case ExperimentKind::fraction_decay:
      if (c.scan.M_min < 1 || c.scan.M_max < c.scan.M_min) throw InvalidArgument("scan: need 1 <= M_min <= M_max");
      if (c.scan.M_max > 170) throw BudgetExceeded("fraction-decay: M_max above 170 overflows M!");
      return;
    default: break;
  }

  if (c.experiment == ExperimentKind::grover_sweep && m.model != "grover") {
    throw InvalidArgument("grover-sweep requires model.model = 'grover'");
  }
  if (c.experiment == ExperimentKind::tsp_run && !detail::is_tsp(m)) {
    throw InvalidArgument("tsp-run requires a TSP model");
  }
  if (m.model == "grover" && m.instance_path) throw InvalidArgument("grover does not take an instance file");

  const auto sizes = detail::effective_sizes(m);
  if (sizes.empty()) throw InvalidArgument("model.sizes must not be empty");
  if (c.experiment == ExperimentKind::gap_scan && sizes.size() != 1) {
    throw InvalidArgument("gap-scan takes exactly one size");
  }
  constexpr std::size_t lo = 2;
  for (std::size_t s : sizes) {
    if (s < lo || s > detail::model_limit(m.model)) {
      throw BudgetExceeded("model.sizes: " + std::to_string(s) + " outside [" + std::to_string(lo) + ", " +
                           std::to_string(detail::model_limit(m.model)) + "] for " + m.model);
    }
    const std::size_t dim = detail::model_dim(m, s);
    const std::size_t cap = c.experiment == ExperimentKind::gap_scan ? models::kMaxTupleDim : kMaxEvolveDim;
    if (dim > cap) {
      throw BudgetExceeded(m.model + " size " + std::to_string(s) + ": dimension " + std::to_string(dim) +
                           " exceeds " + std::to_string(cap) + "; lower the size or n_max_override");
    }
  }
  if (c.experiment == ExperimentKind::gap_scan) {
    if (c.scan.grid_size < 2) throw InvalidArgument("scan.grid_size must be >= 2");
    return;
  }
  if (c.time.values.empty() == c.time.t_min_multipliers.empty()) {
    throw InvalidArgument("time: give exactly one of 'values' or 't_min_multipliers'");
  }
  for (double v : c.time.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("time.values must be finite and >= 0");
  }
  for (double v : c.time.t_min_multipliers) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("time.t_min_multipliers must be finite and >= 0");
  }
  if (!(c.step.step_bound_factor > 0.0) || !(c.step.norm_tol > 0.0)) {
    throw InvalidArgument("step: step_bound_factor and norm_tol must be positive");
  }
  if (c.step.fixed_step && !(*c.step.fixed_step > 0.0)) throw InvalidArgument("step.fixed_step must be positive");
  if (c.step.samples_per_run < 2) throw InvalidArgument("step.samples_per_run must be >= 2");
  const std::size_t times = c.time.values.size() + c.time.t_min_multipliers.size();
  const std::size_t per_size = (m.model == "grover" || m.instance_path) ? 1 : m.instances;
  if (sizes.size() * per_size * c.seeds.size() * times > kMaxCells) {
    throw BudgetExceeded("too many cells; at most " + std::to_string(kMaxCells));
  }
}

/// Builds the bundle for one (size, seed, instance) cell.
inline models::ModelBundle build_model(const ModelConfig& m, std::size_t size, std::uint64_t seed,
                                       std::size_t instance) {
  if (m.model == "grover") return models::build_grover(size, (m.marked + seed) % size);
  auto inst = detail::file_instance(m);
  if (!inst) {
    inst = tsp::random_instance(size, tsp::DistanceSampler::uniform(m.distance_low, m.distance_high), seed, instance);
  }
  const std::size_t M = inst->size();
  if (m.model == "tsp-rank") {
    const double a = m.alpha_scale * std::sqrt(static_cast<double>(tsp::factorial(M)));
    return models::build_tsp_rank(*inst, hilbert::Complex(a, 0.0), m.n_max_override);
  }
  if (m.model == "tsp-tuple") {
    const double a = m.alpha_scale * std::sqrt(static_cast<double>(M));
    return models::build_tsp_tuple(*inst, std::vector<hilbert::Complex>(M, {a, 0.0}), m.n_max_override, m.policy());
  }
  return models::build_tsp_finite(*inst, m.policy());
}

namespace detail {

struct Cell {
  std::size_t size = 0;
  std::uint64_t seed = 0;
  std::size_t instance = 0;
  std::optional<double> T;
  double multiplier = 0.0;
};

inline std::vector<Cell> evolve_cells(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  const auto sizes = effective_sizes(c.model);
  const std::size_t per_size = (c.model.model == "grover" || c.model.instance_path) ? 1 : c.model.instances;
  for (std::size_t size : sizes) {
    for (std::uint64_t seed : c.seeds) {
      for (std::size_t inst = 0; inst < per_size; ++inst) {
        for (double T : c.time.values) cells.push_back({size, seed, inst, T, 0.0});
        for (double k : c.time.t_min_multipliers) cells.push_back({size, seed, inst, std::nullopt, k});
      }
    }
  }
  return cells;
}

inline evolution::StepPolicy step_policy(const StepConfig& s) {
  evolution::StepPolicy p;
  p.step_bound_factor = s.step_bound_factor;
  p.norm_tol = s.norm_tol;
  p.samples_per_run = s.samples_per_run;
  p.fixed_step = s.fixed_step;
  p.renormalize = s.renormalize;
  return p;
}

inline json run_evolve_cell(const ExperimentConfig& c, const Cell& cell) {
  const auto bundle = build_model(c.model, cell.size, cell.seed, cell.instance);
  const std::size_t dim = bundle.g_I.dim();
  const auto kind = evolution::schedule_kind_from_string(c.schedule);
  const double delta = bounds::delta_ie(bundle.g_I, bundle.H_P);
  const double t_min = delta > 0.0 ? bounds::t_min(evolution::make_schedule(kind, dim, 1.0), delta)
                                   : std::numeric_limits<double>::infinity();
  double T = cell.T ? *cell.T : cell.multiplier * t_min;
  if (!std::isfinite(T)) throw InvalidArgument("t_min is infinite (delta_ie = 0); use time.values");
  const auto sch = evolution::make_schedule(kind, dim, T);
  const auto run = evolution::evolve_refined(bundle.H_I, bundle.H_P, bundle.g_I, sch, step_policy(c.step));
  const double E_I0 = hilbert::expectation(bundle.H_I, bundle.g_I);
  const auto betas = bounds::standard_betas(bundle.g_I, bundle.H_P);
  const auto report = bounds::bound_report(run, bundle.g_I, E_I0, bundle.H_P, betas);

  double slack_min = std::numeric_limits<double>::infinity();
  double distance_max = 0.0;
  std::size_t violations = 0;
  for (const auto& mg : report.margins) {
    if (mg.applicable) slack_min = std::min(slack_min, mg.slack);
    distance_max = std::max(distance_max, mg.distance);
    violations += mg.holds ? 0 : 1;
  }
  json out = {{"model", bundle.name},
              {"size", cell.size},
              {"seed", cell.seed},
              {"instance", cell.instance},
              {"dim", dim},
              {"T", T},
              {"delta_ie", delta},
              {"t_min", std::isfinite(t_min) ? json(t_min) : json(nullptr)},
              {"success_prob", evolution::success_probability(run, bundle.target.indices)},
              {"target_degenerate", bundle.target.degenerate()},
              {"slack_min", std::isfinite(slack_min) ? json(slack_min) : json(nullptr)},
              {"distance_max", distance_max},
              {"violations", violations},
              {"steps", run.steps},
              {"max_norm_drift", run.max_norm_drift},
              {"alpha_cost", bundle.energy_budget.alpha_cost},
              {"path_norm_bound", bundle.energy_budget.path_bound(sch)},
              {"truncation_tail", bundle.truncation_tail},
              {"report", bounds::to_json(report)}};
  return out;
}

/// Runs fn(i) for i in [0, n) on `threads` workers; rethrows the lowest-index failure.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1)));
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::string num(const json& v) {
  if (v.is_null()) return "nan";
  if (v.is_number_float()) return cell(v.get<double>());
  return v.dump();
}

inline void run_evolve_experiment(const ExperimentConfig& c, unsigned threads, const std::filesystem::path& out,
                                  RunManifest& m) {
  const auto cells = evolve_cells(c);
  std::vector<json> results(cells.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    results[i] = run_evolve_cell(c, cells[i]);
    write_atomic(out / "cells" / ("cell-" + std::to_string(i) + ".json"), results[i].dump(2) + "\n");
  });

  for (const auto& r : results) {
    m.outputs.push_back(r);
    m.violations += r.at("violations").get<std::size_t>();
  }

  const char* size_col = c.model.model == "grover" ? "N" : "M";
  if (c.experiment == ExperimentKind::grover_sweep) {
    m.table.header = {"N", "delta_ie", "t_min", "success_prob", "slack_min", "T"};
    Series s{"success-vs-T", "success probability against run time", {"T", "success_prob"}, {}};
    for (const auto& r : results) {
      m.table.add({num(r["size"]), num(r["delta_ie"]), num(r["t_min"]), num(r["success_prob"]), num(r["slack_min"]),
                   num(r["T"])});
      s.rows.push_back({r["T"].get<double>(), r["success_prob"].get<double>()});
    }
    m.series.push_back(std::move(s));
  } else if (c.experiment == ExperimentKind::tsp_run) {
    m.table.header = {"model",        "M",         "seed",       "instance",   "T",
                      "delta_ie",     "t_min",     "success_prob", "slack_min", "alpha_cost",
                      "path_norm_bound"};
    Series s{"success-vs-T", "success probability against run time", {"T", "success_prob"}, {}};
    for (const auto& r : results) {
      m.table.add({r["model"].get<std::string>(), num(r["size"]), num(r["seed"]), num(r["instance"]), num(r["T"]),
                   num(r["delta_ie"]), num(r["t_min"]), num(r["success_prob"]), num(r["slack_min"]),
                   num(r["alpha_cost"]), num(r["path_norm_bound"])});
      s.rows.push_back({r["T"].get<double>(), r["success_prob"].get<double>()});
    }
    m.series.push_back(std::move(s));
  } else {
    m.table.header = {"model", size_col, "seed", "instance", "T", "beta", "lhs", "rhs", "slack", "distance", "holds"};
    Series s{"slack-vs-T", "minimum applicable slack of the distance bound against run time", {"T", "slack_min"}, {}};
    for (const auto& r : results) {
      for (const auto& mg : r["report"]["margins"]) {
        m.table.add({r["model"].get<std::string>(), num(r["size"]), num(r["seed"]), num(r["instance"]), num(r["T"]),
                     num(mg["beta"]), num(mg["lhs"]), num(mg["rhs"]), num(mg["slack"]), num(mg["distance"]),
                     mg["holds"].get<bool>() ? "1" : "0"});
      }
      if (!r["slack_min"].is_null()) s.rows.push_back({r["T"].get<double>(), r["slack_min"].get<double>()});
    }
    std::stable_sort(s.rows.begin(), s.rows.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
    m.series.push_back(std::move(s));
  }
}

inline void run_gap_experiment(const ExperimentConfig& c, RunManifest& m) {
  const std::size_t size = effective_sizes(c.model).front();
  const auto bundle = build_model(c.model, size, c.seeds.front(), 0);
  const auto kind = evolution::schedule_kind_from_string(c.schedule);
  bounds::GapScanOptions opt;
  opt.grid_size = c.scan.grid_size;
  opt.refine_rounds = c.scan.refine_rounds;
  const auto rep = bounds::gap_scan(bundle.H_I, bundle.H_P, evolution::make_schedule(kind, bundle.g_I.dim(), 1.0), opt);
  json r = bounds::to_json(rep);
  r["model"] = bundle.name;
  r["size"] = size;
  const double delta = bounds::delta_ie(bundle.g_I, bundle.H_P);
  r["delta_ie"] = delta;
  r["t_min"] = delta > 0.0 ? json(bounds::t_min(evolution::make_schedule(kind, bundle.g_I.dim(), 1.0), delta))
                           : json(nullptr);
  m.outputs.push_back(r);

  m.table.header = {"model", "size", "g_min", "g_min_location", "norm_dH", "t_adb", "t_min", "level_crossing"};
  m.table.add({bundle.name, cell(size), num(r["g_min"]), num(r["g_min_location"]), num(r["norm_dH"]), num(r["t_adb"]),
               num(r["t_min"]), rep.level_crossing ? "1" : "0"});
  Series e0{"E0", "lowest eigenvalue along the path", {"s", "E0"}, {}};
  Series e1{"E1", "second eigenvalue along the path", {"s", "E1"}, {}};
  Series gap{"gap", "spectral gap along the path", {"s", "gap"}, {}};
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    e0.rows.push_back({rep.grid[i], rep.E0[i]});
    e1.rows.push_back({rep.grid[i], rep.E1[i]});
    gap.rows.push_back({rep.grid[i], rep.E1[i] - rep.E0[i]});
  }
  m.series = {std::move(e0), std::move(e1), std::move(gap)};
}

inline void run_sigma_experiment(const ExperimentConfig& c, unsigned threads, RunManifest& m) {
  const auto sampler = tsp::DistanceSampler::uniform(c.model.distance_low, c.model.distance_high);
  const auto rep = tsp::sigma_scaling_study(c.scan.M_min, c.scan.M_max, c.scan.samples, c.seeds.front(), sampler, threads);
  m.table.header = {"M", "samples", "sigma_mean", "sigma_stderr", "ratio_sqrtM"};
  Series s{"sigma-vs-sqrtM", "mean tour-length spread against sqrt(M), with sigma/sqrt(M)",
           {"sqrtM", "sigma_mean", "ratio_sqrtM"}, {}};
  for (const auto& r : rep.rows) {
    m.outputs.push_back({{"M", r.M},
                         {"samples", r.samples},
                         {"sigma_mean", r.sigma_mean},
                         {"sigma_stderr", r.sigma_stderr},
                         {"ratio_sqrtM", r.ratio_sqrtM}});
    m.table.add({cell(r.M), cell(r.samples), cell(r.sigma_mean), cell(r.sigma_stderr), cell(r.ratio_sqrtM)});
    s.rows.push_back({std::sqrt(static_cast<double>(r.M)), r.sigma_mean, r.ratio_sqrtM});
  }
  m.series.push_back(std::move(s));
}

inline void run_fraction_experiment(const ExperimentConfig& c, RunManifest& m) {
  const auto rows = tsp::tour_fraction_decay(c.scan.M_min, c.scan.M_max);
  m.table.header = {"M", "ratio", "stirling", "rel_deviation", "quoted_form", "quoted_deviation", "log_decrement"};
  Series s{"fraction-vs-M", "tour fraction M!/M^M and its Stirling estimate", {"M", "ratio", "stirling"}, {}};
  for (const auto& r : rows) {
    m.outputs.push_back({{"M", r.M},
                         {"ratio", r.ratio},
                         {"stirling", r.stirling},
                         {"rel_deviation", r.rel_deviation},
                         {"quoted_form", r.quoted_form},
                         {"quoted_deviation", r.quoted_deviation},
                         {"log_decrement", r.log_decrement}});
    m.table.add({cell(r.M), cell(r.ratio), cell(r.stirling), cell(r.rel_deviation), cell(r.quoted_form),
                 cell(r.quoted_deviation), cell(r.log_decrement)});
    s.rows.push_back({static_cast<double>(r.M), r.ratio, r.stirling});
  }
  m.series.push_back(std::move(s));
}

}  // namespace detail

/// Writes one `<name>.dat` per series: a `#` header line, then whitespace-separated rows.
inline std::vector<std::filesystem::path> emit_plots(const RunManifest& m, const std::filesystem::path& dir) {
  if (m.series.empty()) throw InvalidArgument("emit_plots: manifest has no series");
  std::vector<std::filesystem::path> written;
  for (const auto& s : m.series) {
    std::string text = "# " + s.name + ": " + s.description + "; columns:";
    for (const auto& col : s.columns) text += " " + col;
    text += "\n";
    for (const auto& row : s.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) text += (i ? " " : "") + cell(row[i]);
      text += "\n";
    }
    const auto path = dir / (s.name + ".dat");
    write_atomic(path, text);
    written.push_back(path);
  }
  return written;
}

struct RunOptions {
  std::optional<unsigned> threads;
  /// Overrides config.output_dir.
  std::optional<std::filesystem::path> out_dir;
};

/// Runs the experiment, writes `<experiment>.csv`, `manifest.json` and plot
/// data under the output directory. Failed slack or distance-cap checks are
/// counted in `violations`, not thrown.
inline RunManifest run(const ExperimentConfig& config, const RunOptions& options = {}) {
  validate_budgets(config);
  const auto start = std::chrono::steady_clock::now();
  const unsigned threads = resolve_threads(options.threads);
  const std::filesystem::path out = options.out_dir ? *options.out_dir : std::filesystem::path(config.output_dir);

  RunManifest m;
  m.config = config;
  switch (config.experiment) {
    case ExperimentKind::grover_sweep:
    case ExperimentKind::tsp_run:
    case ExperimentKind::bound_audit: detail::run_evolve_experiment(config, threads, out, m); break;
    case ExperimentKind::gap_scan: detail::run_gap_experiment(config, m); break;
    case ExperimentKind::sigma_scan: detail::run_sigma_experiment(config, threads, m); break;
    case ExperimentKind::fraction_decay: detail::run_fraction_experiment(config, m); break;
  }
  m.content_hash = sha256_hex(std::string(to_string(config.experiment)) + "\n" + m.outputs.dump());
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_atomic(out / (std::string(to_string(config.experiment)) + ".csv"), to_csv(m.table));
  write_atomic(out / "manifest.json", to_json(m).dump(2) + "\n");
  emit_plots(m, out);
  return m;
}

}  // namespace adiabound::experiments
