#include "spinmem/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "spinmem/analysis.hpp"
#include "spinmem/errors.hpp"
#include "spinmem/io.hpp"

namespace spinmem {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool wants(const ExperimentConfig& cfg, const char* format) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), format) != cfg.formats.end();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string trajectory_csv(const TrajectoryRecord& record,
                           const std::vector<double>& bound_column) {
  std::string csv = "step,tau_i,success_prob,fidelity_bound";
  for (int n = 1; n <= record.layout.n_a; ++n) csv += ",P_" + std::to_string(n);
  csv += ",chain_excitation_expectation,B_occupancy_before_swap\n";
  for (std::size_t i = 0; i < record.rows.size(); ++i) {
    const TrajectoryRow& row = record.rows[i];
    const double bound = bound_column.empty() ? row.fidelity_bound : bound_column[i];
    csv += std::to_string(row.step);
    csv += "," + format_double(row.tau);
    csv += "," + format_double(row.success_prob);
    csv += "," + format_double(bound);
    for (double p : row.p_at_least) csv += "," + format_double(p);
    csv += "," + format_double(row.chain_excitation_expectation);
    csv += "," + format_double(row.b_occupancy_before_swap);
    csv += "\n";
  }
  return csv;
}

json transfer_map_json(const TransferMap& map, const RecoveryMetrics& metrics, int n_b) {
  json j;
  j["steps"] = map.steps;
  j["alice_dim"] = map.alice_dim;
  j["memory_sites_per_register"] = n_b;
  json states = json::array();
  for (const auto& mem : map.memory_states) states.push_back(mem);
  j["memory_states"] = std::move(states);
  j["matrix"] = complex_matrix_to_json(map.matrix);
  j["singular_values"] = std::vector<double>(
      metrics.singular_values.data(),
      metrics.singular_values.data() + metrics.singular_values.size());
  j["worst_case_fidelity_bound"] = metrics.worst_case_fidelity_bound;
  j["decoder"] = complex_matrix_to_json(metrics.decoder);
  return j;
}

json manifest_json(const char* command, const ExperimentConfig& cfg,
                   const std::vector<std::string>& artifacts,
                   const std::vector<std::uint64_t>& seed_trail, double wall_seconds) {
  json j;
  j["command"] = command;
  j["config"] = cfg.to_json();
  j["artifacts"] = artifacts;
  j["versions"] = {{"spinmem", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  j["seed_trail"] = seed_trail;
  j["wall_clock_seconds"] = wall_seconds;
  return j;
}

std::vector<std::uint64_t> seed_trail_of(const ChainSpec& spec) {
  if (spec.rng_seed) return {*spec.rng_seed};
  return {};
}

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void run_simulation_bundle(const ExperimentConfig& cfg, const ChainSpec& chain,
                           const ProtocolSchedule& schedule, const fs::path& dir,
                           std::vector<std::string>& artifacts, std::ostream& out) {
  const Eigen::VectorXcd input = resolve_input(cfg.input, chain.layout.n_a);
  const SimulationResult sim = simulate(chain, schedule, input);
  const TransferRun run = transfer_map_run(chain, schedule);
  const RecoveryMetrics metrics = recovery_metrics(run.final_map);

  if (wants(cfg, "csv")) {
    write_file(dir / "trajectory.csv",
               trajectory_csv(sim.record, run.stepwise_worst_case_bound));
    artifacts.push_back("trajectory.csv");
  }
  if (wants(cfg, "json")) {
    write_file(dir / "transfer_map.json",
               transfer_map_json(run.final_map, metrics, chain.layout.n_b).dump(2) + "\n");
    artifacts.push_back("transfer_map.json");
  }
  out << "fidelity_bound=" << format_double(metrics.worst_case_fidelity_bound) << "\n";
}

}  // namespace

void cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& out) {
  Stopwatch clock;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  const ChainSpec chain = resolve_chain(cfg.chain, std::nullopt);
  const Eigen::VectorXcd input = resolve_input(cfg.input, chain.layout.n_a);
  const ProtocolSchedule schedule = resolve_schedule(cfg.schedule, chain, input);

  std::vector<std::string> artifacts;
  run_simulation_bundle(cfg, chain, schedule, dir, artifacts, out);
  artifacts.push_back("manifest.json");
  write_file(dir / "manifest.json",
             manifest_json("simulate", cfg, artifacts, seed_trail_of(chain), clock.seconds())
                     .dump(2) +
                 "\n");
}

void cmd_analyze(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& out) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  const ChainSpec chain = resolve_chain(cfg.chain, std::nullopt);
  if (cfg.analysis.tau_grid.empty())
    throw ConfigError("config: analyze needs a nonempty analysis.tau_grid");

  std::vector<int> sectors = cfg.analysis.sectors;
  if (sectors.empty())
    for (int n = 1; n <= chain.layout.n_a; ++n) sectors.push_back(n);
  for (int n : sectors)
    if (n < 1 || n > chain.layout.total())
      throw ConfigError("config: analysis sector " + std::to_string(n) + " out of range");

  json condition;
  condition["tolerance"] = cfg.analysis.condition_tol;
  json reports = json::array();
  bool first = true;
  for (int n : sectors) {
    const ConditionReport report = check_condition(chain, n, cfg.analysis.condition_tol);
    json r;
    r["sector"] = report.sector;
    r["violated"] = report.violated;
    r["worst_b_weight"] = report.worst_b_weight;
    if (report.offending_eigenvalue) r["offending_eigenvalue"] = *report.offending_eigenvalue;
    reports.push_back(std::move(r));

    const auto curve = scan_tau(chain, n, cfg.analysis.tau_grid);
    std::string csv = "tau_or_step,value,flag\n";
    for (const auto& point : curve)
      csv += format_double(point.tau) + "," + format_double(point.rho) + "," +
             (point.degenerate ? "1" : "0") + "\n";
    const std::string name =
        first ? "rho_vs_tau.csv" : "rho_vs_tau_n" + std::to_string(n) + ".csv";
    write_file(dir / name, csv);
    first = false;
  }
  condition["reports"] = std::move(reports);
  write_file(dir / "condition.json", condition.dump(2) + "\n");
  out << "condition_sectors=" << sectors.size() << "\n";
}

void cmd_sweep(const ExperimentConfig& cfg, const std::string& out_dir, int jobs,
               std::ostream& out) {
  Stopwatch clock;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  if (cfg.sweep.seeds.empty()) throw ConfigError("config: sweep needs sweep.seeds");
  std::vector<SiteLayout> layouts = cfg.sweep.layouts;
  if (layouts.empty()) layouts.push_back(cfg.chain.layout);

  struct Task {
    SiteLayout layout;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& layout : layouts)
    for (std::uint64_t seed : cfg.sweep.seeds) tasks.push_back({layout, seed});

  std::vector<std::string> rows(tasks.size());
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        const Task& task = tasks[i];
        ChainConfig chain_cfg = cfg.chain;
        chain_cfg.layout = task.layout;
        const ChainSpec chain = resolve_chain(chain_cfg, task.seed);
        const Eigen::VectorXcd input = resolve_input(cfg.input, chain.layout.n_a);
        const ProtocolSchedule schedule = resolve_schedule(cfg.schedule, chain, input);
        const SimulationResult sim = simulate(chain, schedule, input);

        double fitted = std::numeric_limits<double>::quiet_NaN();
        if (schedule.steps() >= 10)
          fitted = fit_decay(sim.record, chain.layout).fitted_rate;
        const double model = 1.0 - static_cast<double>(chain.layout.n_b) / chain.layout.total();

        rows[i] = std::to_string(task.seed) + "," + std::to_string(chain.layout.total()) + "," +
                  std::to_string(chain.layout.n_b) + "," + std::to_string(schedule.steps()) +
                  "," + format_double(sim.record.rows.back().success_prob) + "," +
                  format_double(fitted) + "," + format_double(model);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int thread_count = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < thread_count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::string csv = "seed,N,N_B,steps,success_prob,fitted_rate,model_rate\n";
  for (const auto& row : rows) csv += row + "\n";
  write_file(dir / "sweep.csv", csv);

  std::vector<std::uint64_t> trail;
  for (const auto& task : tasks) trail.push_back(task.seed);
  write_file(dir / "manifest.json",
             manifest_json("sweep", cfg, {"sweep.csv", "manifest.json"}, trail, clock.seconds())
                     .dump(2) +
                 "\n");
  out << "sweep_rows=" << rows.size() << "\n";
}

void cmd_optimize(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& out) {
  Stopwatch clock;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  if (cfg.schedule.kind != ScheduleConfig::Kind::Optimized)
    throw ConfigError("config: optimize needs schedule.optimize settings");

  const ChainSpec chain = resolve_chain(cfg.chain, std::nullopt);
  const Eigen::VectorXcd input = resolve_input(cfg.input, chain.layout.n_a);
  const ProtocolSchedule schedule = resolve_schedule(cfg.schedule, chain, input);

  std::vector<std::string> artifacts;
  write_file(dir / "schedule.json", json{{"taus", schedule.taus}}.dump(2) + "\n");
  artifacts.push_back("schedule.json");
  run_simulation_bundle(cfg, chain, schedule, dir, artifacts, out);
  artifacts.push_back("manifest.json");
  write_file(dir / "manifest.json",
             manifest_json("optimize", cfg, artifacts, seed_trail_of(chain), clock.seconds())
                     .dump(2) +
                 "\n");
}

}  // namespace spinmem
