// Acceptance suite: end-to-end checks against independent oracles, one
// pass/fail line per criterion. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "spinmem/analysis.hpp"
#include "spinmem/commands.hpp"
#include "spinmem/errors.hpp"
#include "spinmem/io.hpp"
#include "spinmem/protocol.hpp"

using namespace spinmem;
namespace oracle = spinmem::testing;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << idx << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!ok) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

Eigen::MatrixXcd embed_sector_sum_unitary(const ChainSpec& spec, double tau) {
  const int n_sites = spec.layout.total();
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n <= n_sites; ++n) {
    const SectorUnitary u = evolve(diagonalize(build_chain(spec, n)), tau);
    for (std::size_t r = 0; r < u.basis.dim(); ++r)
      for (std::size_t c = 0; c < u.basis.dim(); ++c)
        full(u.basis.state(r), u.basis.state(c)) = u.matrix(r, c);
  }
  return full;
}

// shared between criteria 2/4 and 6
struct ProtocolCase {
  ChainSpec spec;
  double tau = 0.0;
  TrajectoryRecord record;
};
std::vector<ProtocolCase> g_c2_cases;
std::vector<ProtocolCase> g_c4_cases;
std::vector<std::uint64_t> g_c4_seeds;
int g_c4_first_jstar = 0;

void criterion_1() {
  Timer timer;
  double worst = 0.0;
  for (int n_sites = 2; n_sites <= 8; ++n_sites) {
    for (Model model : {Model::Heisenberg, Model::XY}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const SiteLayout layout{1, n_sites - 2, 1};
        const ChainSpec spec = random_chain(layout, model, 0.5, 1.5, seed);
        const double tau = 0.3 + 0.17 * static_cast<double>(seed);
        const double dev = (embed_sector_sum_unitary(spec, tau) -
                            oracle::full_unitary(spec, tau))
                               .cwiseAbs()
                               .maxCoeff();
        worst = std::max(worst, dev);
      }
    }
  }
  report(1, "sector propagators match the full matrix exponential", worst <= 1e-9,
         "max deviation " + format_double(worst) + ", " + format_double(timer.seconds()) + " s");
}

void criterion_2() {
  Timer timer;
  double worst = 0.0;
  struct Case {
    SiteLayout layout;
    Model model;
    std::uint64_t seed;
  };
  const std::vector<Case> cases{{{1, 2, 1}, Model::Heisenberg, 201},
                                {{1, 3, 1}, Model::XY, 202},
                                {{2, 3, 1}, Model::Heisenberg, 203},
                                {{1, 1, 2}, Model::XY, 204},
                                {{1, 3, 2}, Model::Heisenberg, 205},
                                {{2, 2, 2}, Model::XY, 206}};
  const double tau = 0.9;
  const int total_steps = 3;

  for (const Case& c : cases) {
    const ChainSpec spec = random_chain(c.layout, c.model, 0.5, 1.5, c.seed);
    for (bool superpose : {false, true}) {
      const Eigen::VectorXcd input =
          superpose ? preset_plus_state(c.layout.n_a) : preset_all_up(c.layout.n_a);
      ProtocolEngine engine(spec, c.layout.n_a);
      JointState state = engine.initial_state(input);
      TrajectoryRecord record{spec.layout, {}};
      for (int j = 1; j <= total_steps; ++j) {
        record.rows.push_back(engine.advance(state, tau));
        const ProtocolSchedule prefix = ProtocolSchedule::uniform(tau, j);
        const Eigen::VectorXcd reference = oracle::full_protocol_state(spec, prefix, input);
        const Eigen::VectorXcd embedded =
            oracle::embed_joint_state(state, total_steps * c.layout.n_b);
        // reference register sized for j steps; compare on the shared prefix
        Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(embedded.size());
        padded.head(reference.size()) = reference;
        worst = std::max(worst, (embedded - padded).cwiseAbs().maxCoeff());
      }
      if (!superpose) g_c2_cases.push_back({spec, tau, std::move(record)});
    }
  }
  report(2, "exact protocol matches the brute-force chain+memory oracle", worst <= 1e-9,
         "max deviation " + format_double(worst) + ", " + format_double(timer.seconds()) + " s");
}

void criterion_3() {
  double worst = 0.0;
  bool ordered = true;
  for (int i = 0; i < 10; ++i) {
    const int n_sites = 4 + (i % 5);
    const Model model = (i % 2 == 0) ? Model::Heisenberg : Model::XY;
    const ChainSpec spec =
        random_chain({1, n_sites - 2, 1}, model, 0.5, 1.5, 300 + static_cast<std::uint64_t>(i));
    const double tau = 0.6 + 0.05 * i;

    const double eta1 = eta_direct(spec, tau, 1);
    const double eta2 = eta_direct(spec, tau, 2);
    ordered = ordered && (eta2 >= eta1 - 1e-15);
    for (int j : {1, 2}) {
      const TransferMap k = transfer_map(spec, ProtocolSchedule::uniform(tau, j));
      const double from_map = k.matrix.col(1).squaredNorm();
      worst = std::max(worst, std::abs((j == 1 ? eta1 : eta2) - from_map));
    }
  }
  report(3, "closed-form recovery fidelities match the transfer map",
         worst <= 1e-12 && ordered,
         "max deviation " + format_double(worst) + (ordered ? "" : ", ordering broken"));
}

void criterion_4() {
  Timer timer;
  bool ok = true;
  std::string detail;
  double worst_bound = 1.0;
  int certified = 0;
  int skipped = 0;  // draws whose J* exceeds the power cap (near-localized modes)
  for (std::uint64_t seed = 101; certified < 10 && seed <= 200; ++seed) {
    const ChainSpec spec = random_chain({1, 6, 1}, Model::Heisenberg, 0.5, 1.5, seed);
    const double tau = 1.0;

    const ConditionReport condition = check_condition(spec, 1);
    const SectorContraction t = build_T(evolve(diagonalize(build_chain(spec, 1)), tau),
                                        spec.layout);
    const double rho = spectral_radius_checked(t.matrix).rho;
    if (condition.violated || !(rho < 1.0)) {
      ok = false;
      detail = "seed " + std::to_string(seed) + " failed the certificate premise";
      break;
    }

    // smallest j with ||T^j||^2 <= 1e-3, found by sequential powering; the
    // power cap bounds the search, slower disorder draws are skipped
    int j_star = 0;
    Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(t.matrix.rows(), t.matrix.cols());
    for (int j = 1; j <= kMaxPowerSteps; ++j) {
      power = t.matrix * power;
      const double q = operator_norm(power);
      if (q * q <= 1e-3) {
        j_star = j;
        break;
      }
    }
    if (j_star == 0) {
      ++skipped;
      continue;
    }

    if (certified == 0) g_c4_first_jstar = j_star;
    ++certified;
    g_c4_seeds.push_back(seed);

    const ProtocolSchedule schedule = ProtocolSchedule::uniform(tau, j_star);
    const RecoveryMetrics metrics = recovery_metrics(transfer_map(spec, schedule));
    worst_bound = std::min(worst_bound, metrics.worst_case_fidelity_bound);
    if (!(metrics.worst_case_fidelity_bound >= 1.0 - 2e-3)) {
      ok = false;
      detail = "seed " + std::to_string(seed) + " bound " +
               format_double(metrics.worst_case_fidelity_bound) + " at J*=" +
               std::to_string(j_star);
      break;
    }
    g_c4_cases.push_back(
        {spec, tau, simulate(spec, schedule, preset_all_up(1)).record});
  }
  if (ok && certified < 10) {
    ok = false;
    detail = "only " + std::to_string(certified) + " chains certified";
  }
  if (detail.empty())
    detail = "worst bound " + format_double(worst_bound) + ", J*(first chain) " +
             std::to_string(g_c4_first_jstar) + ", " + std::to_string(skipped) +
             " slow draws skipped, " + format_double(timer.seconds()) + " s";
  report(4, "convergence certificate reaches the 1e-3 recovery target", ok, detail);
}

void criterion_5() {
  ChainSpec cut;
  cut.layout = {1, 6, 1};
  cut.model = Model::Heisenberg;
  cut.couplings.assign(7, 1.0);
  cut.couplings.back() = 0.0;
  cut.fields.assign(8, 0.0);

  const ConditionReport condition = check_condition(cut, 1);
  std::vector<double> grid;
  for (int i = 0; i < 25; ++i) grid.push_back(0.25 + 0.25 * i);
  const auto curve = scan_tau(cut, 1, grid);
  bool all_stuck = true;
  for (const auto& p : curve) all_stuck = all_stuck && (p.rho >= 1.0 - 1e-8);

  report(5, "a decoupled receiver is flagged and its radius pins to one",
         condition.violated && all_stuck,
         "worst B-weight " + format_double(condition.worst_b_weight));
}

void criterion_6() {
  bool monotone = true;
  for (const auto& group : {std::cref(g_c2_cases), std::cref(g_c4_cases)}) {
    for (const ProtocolCase& c : group.get()) {
      double prev = 0.0;
      for (const auto& row : c.record.rows) {
        monotone = monotone && (row.success_prob >= prev - 1e-10);
        prev = row.success_prob;
      }
    }
  }

  // P_n(j1 + j) <= P_{n+1}(j1) + Q_n(j), with Q from the contraction powers
  bool chained = true;
  double worst_slack = 0.0;
  for (const ProtocolCase& c : g_c2_cases) {
    const int n_a = c.spec.layout.n_a;
    const int steps = static_cast<int>(c.record.rows.size());
    auto p_of = [&](int n, int j) -> double {
      if (n > n_a) return 0.0;
      return c.record.rows[static_cast<std::size_t>(j - 1)]
          .p_at_least[static_cast<std::size_t>(n - 1)];
    };
    for (int n = 1; n <= n_a; ++n) {
      for (int j1 = 1; j1 < steps; ++j1) {
        for (int j = 1; j1 + j <= steps; ++j) {
          const double lhs = p_of(n, j1 + j);
          const double rhs = p_of(n + 1, j1) + survival_bound(c.spec, c.tau, n, j);
          worst_slack = std::max(worst_slack, lhs - rhs);
          chained = chained && (lhs <= rhs + 1e-9);
        }
      }
    }
  }
  report(6, "success is monotone and the survival inequality holds", monotone && chained,
         "worst slack " + format_double(worst_slack));
}

void criterion_7() {
  Timer timer;
  double sum_rate = 0.0;
  int count = 0;
  for (std::uint64_t seed = 501; seed <= 510; ++seed) {
    const ChainSpec spec = random_chain({2, 2, 2}, Model::Heisenberg, 0.5, 1.5, seed);
    const double te = estimate_Te(spec, 30.0, 0.05);
    const ProtocolSchedule schedule =
        optimize_schedule(spec, 15, te / 12.0, te, 16, preset_all_up(2));
    const SimulationResult res = simulate(spec, schedule, preset_all_up(2));
    sum_rate += fit_decay(res.record, spec.layout).fitted_rate;
    ++count;
  }
  const double mean = sum_rate / count;
  const double target = 2.0 / 3.0;
  const bool ok = std::abs(mean - target) <= 0.3 * target;
  report(7, "mean optimized decay rate tracks 1 - N_B/N", ok,
         "mean rate " + format_double(mean) + " vs " + format_double(target) + ", " +
             format_double(timer.seconds()) + " s");
}

void criterion_8() {
  ChainSpec mirror;
  mirror.layout = {1, 4, 1};
  mirror.model = Model::XY;
  mirror.couplings = oracle::mirror_couplings(6);
  mirror.fields.assign(6, 0.0);

  const double t_star = oracle::perfect_transfer_time(mirror);
  const SimulationResult res =
      simulate(mirror, ProtocolSchedule{{t_star}}, preset_all_up(1));
  const double success = res.record.rows[0].success_prob;
  report(8, "engineered mirror chain transfers in a single swap", success >= 1.0 - 1e-9,
         "success " + format_double(success) + " at t* " + format_double(t_star) +
             " (pi/2 = " + format_double(std::numbers::pi / 2) + ")");
}

void criterion_9() {
  nlohmann::json j;
  j["chain"] = {{"model", "heisenberg"},
                {"layout", {{"n_a", 1}, {"n_c", 6}, {"n_b", 1}}},
                {"coupling_range", {0.5, 1.5}},
                {"seed", 101}};
  j["schedule"] = {{"tau", 1.0}, {"steps", g_c4_first_jstar > 0 ? g_c4_first_jstar : 60}};
  j["input"] = "all_up";
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);

  const fs::path base = fs::temp_directory_path() / "spinmem_acceptance";
  const fs::path dir_a = base / "run_a";
  const fs::path dir_b = base / "run_b";
  fs::remove_all(base);

  std::ostringstream log;
  cmd_simulate(cfg, dir_a.string(), log);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const nlohmann::json manifest = nlohmann::json::parse(slurp(dir_a / "manifest.json"));
  const ExperimentConfig replay = ExperimentConfig::from_json(manifest["config"]);
  cmd_simulate(replay, dir_b.string(), log);

  const bool identical = slurp(dir_a / "trajectory.csv") == slurp(dir_b / "trajectory.csv");
  fs::remove_all(base);
  report(9, "manifest-driven reruns reproduce the CSV byte for byte", identical, "");
}

}  // namespace

int main() {
  Timer total;
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(failures))
            << " in " << format_double(total.seconds()) << " s" << std::endl;
  return failures;
}
