// adiabound <experiment> --config <path> [--out <dir>] [--threads <n>] [--seed <u64>]
// adiabound validate --config <path>
//
// Exit codes: 0 success, 1 usage or input error, 2 invariant violation.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "adiabound/errors.hpp"
#include "adiabound/experiments/config.hpp"
#include "adiabound/experiments/run.hpp"

namespace ex = adiabound::experiments;

int main(int argc, char** argv) {
  CLI::App app{"Time-energy bound experiments for adiabatic evolutions", "adiabound"};
  app.set_version_flag("--version", ADIABOUND_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;

  for (const char* name : {"grover-sweep", "tsp-run", "bound-audit", "sigma-scan", "gap-scan", "fraction-decay"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--threads", threads, "worker threads (default: ADIABOUND_THREADS, then all cores)");
    sub->add_option("--seed", seed, "replaces the seed list and model seed");
  }
  auto* validate = app.add_subcommand("validate", "parse the config and check budgets without running");
  validate->add_option("--config", config_path, "experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cerr, std::cerr);
    return code == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  ex::ExperimentConfig config;
  try {
    config = ex::load_config(config_path);
    if (seed) {
      config.seeds = {*seed};
      config.model.seed = *seed;
    }
    if (command == "validate") {
      ex::validate_budgets(config);
      std::cout << "ok: " << ex::to_string(config.experiment) << "\n";
      return 0;
    }
    if (command != ex::to_string(config.experiment)) {
      std::cerr << "error: config describes '" << ex::to_string(config.experiment) << "' but the command is '"
                << command << "'\n";
      return 1;
    }
  } catch (const adiabound::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    ex::RunOptions opt;
    opt.threads = threads;
    if (!out_dir.empty()) opt.out_dir = out_dir;
    const auto manifest = ex::run(config, opt);
    std::cout << ex::to_pretty(manifest.table);
    std::cerr << "content hash " << manifest.content_hash << ", " << manifest.wall_clock_seconds << " s\n";
    if (manifest.violations > 0) {
      std::cerr << "invariant violation: " << manifest.violations << " bound check(s) failed\n";
      return 2;
    }
    return 0;
  } catch (const adiabound::NormDriftError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const adiabound::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const adiabound::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const adiabound::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
