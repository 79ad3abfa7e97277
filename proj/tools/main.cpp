#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spinmem/commands.hpp"
#include "spinmem/errors.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

spinmem::ExperimentConfig load_config(const Options& opt) {
  spinmem::ExperimentConfig cfg = spinmem::ExperimentConfig::load(opt.config_path);
  if (opt.seed) cfg.chain.seed = *opt.seed;
  return cfg;
}

std::string effective_out(const Options& opt, const spinmem::ExperimentConfig& cfg) {
  return opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memory-assisted spin-chain state transfer: exact simulation and analysis"};
  app.require_subcommand(1);

  Options opt;
  std::uint64_t seed_value = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", opt.out_dir, "output directory (overrides config)");
    cmd->add_option("--jobs", opt.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed_value, "seed override for random couplings")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run the protocol, emit trajectory + transfer map");
  CLI::App* analyze = app.add_subcommand("analyze", "condition check and rho(tau) scan");
  CLI::App* sweep = app.add_subcommand("sweep", "disorder/layout sweep, one CSV row per run");
  CLI::App* optimize = app.add_subcommand("optimize", "greedy swap-time optimization, then simulate");
  for (CLI::App* cmd : {simulate, analyze, sweep, optimize}) add_common(cmd);

  CLI11_PARSE(app, argc, argv);
  if (seed_set) opt.seed = seed_value;

  try {
    const spinmem::ExperimentConfig cfg = load_config(opt);
    const std::string out_dir = effective_out(opt, cfg);
    if (simulate->parsed()) spinmem::cmd_simulate(cfg, out_dir, std::cout);
    if (analyze->parsed()) spinmem::cmd_analyze(cfg, out_dir, std::cout);
    if (sweep->parsed()) spinmem::cmd_sweep(cfg, out_dir, opt.jobs, std::cout);
    if (optimize->parsed()) spinmem::cmd_optimize(cfg, out_dir, std::cout);
    return 0;
  } catch (const spinmem::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const spinmem::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const spinmem::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
