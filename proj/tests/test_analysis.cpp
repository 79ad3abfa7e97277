#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "spinmem/analysis.hpp"
#include "spinmem/errors.hpp"

using namespace spinmem;
namespace oracle = spinmem::testing;
using cplx = std::complex<double>;

namespace {

ChainSpec uniform_chain(const SiteLayout& layout, Model model, double j = 1.0) {
  ChainSpec spec;
  spec.layout = layout;
  spec.model = model;
  spec.couplings.assign(static_cast<std::size_t>(layout.total() - 1), j);
  spec.fields.assign(static_cast<std::size_t>(layout.total()), 0.0);
  return spec;
}

SectorContraction make_T(const ChainSpec& spec, int n, double tau) {
  return build_T(evolve(diagonalize(build_chain(spec, n)), tau), spec.layout);
}

}  // namespace

TEST_CASE("spectral radius on canonical matrices") {
  CHECK(spectral_radius(Eigen::MatrixXcd::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::MatrixXcd nil = Eigen::MatrixXcd::Zero(2, 2);
  nil(0, 1) = 1.0;
  CHECK(spectral_radius(nil) == doctest::Approx(0.0));

  const SpectralRadiusResult idres = spectral_radius_checked(Eigen::MatrixXcd::Identity(4, 4));
  CHECK(idres.consistent);
  CHECK(idres.eigensolver_ok);

  Eigen::MatrixXcd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(spectral_radius(rect), std::invalid_argument);
}

TEST_CASE("contraction radius of a uniform chain sits strictly inside the disk") {
  const ChainSpec spec = uniform_chain({1, 2, 1}, Model::XY);
  const SectorContraction t = make_T(spec, 1, 1.0);
  const double rho = spectral_radius(t);
  CHECK(rho > 0.0);
  CHECK(rho < 1.0);
  CHECK(rho <= operator_norm(t.matrix) + 1e-12);

  // direct eigencomputation as the reference
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(t.matrix);
  CHECK(rho == doctest::Approx(es.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-12));
}

TEST_CASE("gelfand estimate certifies chains with a spectral gap") {
  ChainSpec spec = uniform_chain({1, 2, 1}, Model::Heisenberg);
  spec.couplings = {1.0, 0.8, 1.2};
  spec.fields = {0.1, 0.3, -0.2, 0.4};  // fields break the modulus tie
  const SpectralRadiusResult res = spectral_radius_checked(make_T(spec, 1, 1.0).matrix);
  CHECK(res.eigensolver_ok);
  CHECK(res.consistent);
  CHECK(std::abs(res.rho - res.gelfand) <= 1e-6);
}

TEST_CASE("survival probability decays at the squared spectral radius") {
  ChainSpec spec = random_chain({1, 4, 1}, Model::Heisenberg, 0.5, 1.5, 13);
  spec.fields = {0.05, -0.1, 0.2, 0.0, 0.15, -0.05};
  const SectorContraction t = make_T(spec, 1, 1.0);
  const double rho = spectral_radius(t);

  std::vector<double> xs, ys;
  for (int j = 20; j <= 60; j += 4) {
    xs.push_back(j);
    ys.push_back(std::log(operator_norm(contraction_power(t, j))));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double n = static_cast<double>(xs.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(std::abs(slope - std::log(rho)) <= 0.1 * std::abs(std::log(rho)));
}

TEST_CASE("no factorizing eigenstates on uniform open chains") {
  for (int n_c : {2, 4, 6}) {
    const ChainSpec spec = uniform_chain({1, n_c, 1}, Model::XY);
    for (int n = 1; n <= spec.layout.total(); ++n) {
      const ConditionReport report = check_condition(spec, n);
      CHECK(!report.violated);
      CHECK(report.worst_b_weight >= 1e-10);
    }
  }
}

TEST_CASE("a decoupled receiver block is detected in the one-excitation sector") {
  ChainSpec spec = uniform_chain({1, 2, 1}, Model::XY);
  spec.couplings.back() = 0.0;
  const ConditionReport report = check_condition(spec, 1);
  CHECK(report.violated);
  CHECK(report.worst_b_weight < 1e-10);
  CHECK(report.offending_eigenvalue.has_value());
}

TEST_CASE("the fully excited sector cannot factorize") {
  const ChainSpec spec = uniform_chain({1, 2, 1}, Model::Heisenberg);
  const ConditionReport report = check_condition(spec, 4);
  CHECK(!report.violated);
  CHECK(report.worst_b_weight == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(check_condition(spec, 0), std::invalid_argument);
  CHECK_THROWS_AS(check_condition(spec, 5), std::invalid_argument);
}

TEST_CASE("tau scan matches the two-site closed form and flags its zeros") {
  ChainSpec pair;
  pair.layout = {1, 0, 1};
  pair.model = Model::XY;
  pair.couplings = {1.0};
  pair.fields = {0.0, 0.0};

  const std::vector<double> grid{0.4, 1.2, std::numbers::pi, 4.0, 2.0 * std::numbers::pi};
  const auto curve = scan_tau(pair, 1, grid);
  REQUIRE(curve.size() == grid.size());
  for (const auto& p : curve) {
    CHECK(p.rho == doctest::Approx(std::abs(std::cos(p.tau))).epsilon(1e-9));
    CHECK(p.degenerate == (std::abs(std::cos(p.tau)) >= 1.0 - 1e-8));
  }
  CHECK(curve[2].degenerate);  // tau = pi
  CHECK(curve[4].degenerate);  // tau = 2 pi
  CHECK(!curve[0].degenerate);

  // tau -> 0+ leaves the projected evolution next to the identity
  const auto tiny = scan_tau(pair, 1, {1e-7});
  CHECK(tiny[0].degenerate);

  CHECK_THROWS_AS(scan_tau(pair, 1, {}), std::invalid_argument);
  CHECK_THROWS_AS(scan_tau(pair, 1, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("scan flags mirror the condition check across sectors") {
  const std::vector<double> grid{0.3, 0.7, 1.0, 1.4, 1.9, 2.5};

  const ChainSpec good = uniform_chain({1, 3, 1}, Model::XY);
  for (int n = 1; n <= 4; ++n) {  // nonempty B-free sectors
    const auto curve = scan_tau(good, n, grid);
    bool some_converging_tau = false;
    for (const auto& p : curve) some_converging_tau |= !p.degenerate;
    CHECK(some_converging_tau == !check_condition(good, n).violated);
  }

  ChainSpec bad = good;
  bad.couplings.back() = 0.0;
  const auto curve = scan_tau(bad, 1, grid);
  for (const auto& p : curve) {
    CHECK(p.rho >= 1.0 - 1e-8);
    CHECK(p.degenerate);
  }
}

TEST_CASE("transit time of the two-site chain is a quarter period") {
  ChainSpec pair;
  pair.layout = {1, 0, 1};
  pair.model = Model::XY;
  pair.couplings = {1.0};
  pair.fields = {0.0, 0.0};
  const double te = estimate_Te(pair, 4.0, 0.001);
  CHECK(te == doctest::Approx(std::numbers::pi / 2).epsilon(1e-3));
}

TEST_CASE("transit time scales with the coupling and the length") {
  const ChainSpec base = uniform_chain({1, 2, 1}, Model::XY);
  ChainSpec doubled = base;
  for (double& j : doubled.couplings) j = 2.0;
  const double te1 = estimate_Te(base, 8.0, 0.01);
  const double te2 = estimate_Te(doubled, 4.0, 0.005);
  CHECK(te1 == doctest::Approx(2.0 * te2).epsilon(1e-9));  // same grid index

  const double te_short = estimate_Te(uniform_chain({1, 2, 1}, Model::XY), 20.0, 0.02);
  const double te_long = estimate_Te(uniform_chain({1, 6, 1}, Model::XY), 20.0, 0.02);
  const double ratio = te_long / te_short;
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.5);
}

TEST_CASE("transit estimation flags boundary maxima and dead chains") {
  const ChainSpec spec = uniform_chain({1, 2, 1}, Model::XY);
  const double early = estimate_Te(spec, 0.5, 0.05);  // below the first arrival
  CHECK(early == doctest::Approx(0.5).epsilon(1e-12));

  ChainSpec cut = spec;
  cut.couplings.back() = 0.0;
  CHECK_THROWS_AS(estimate_Te(cut, 5.0, 0.05), NumericalError);
  CHECK_THROWS_AS(estimate_Te(spec, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_Te(spec, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("decay fit recovers an exact geometric record") {
  TrajectoryRecord record;
  record.layout = {2, 2, 2};
  for (int j = 1; j <= 15; ++j) {
    TrajectoryRow row;
    row.step = j;
    row.chain_excitation_expectation = 2.0 * std::pow(0.8, j);
    record.rows.push_back(row);
  }
  const TimescaleModel model = fit_decay(record, record.layout);
  CHECK(model.fitted_rate == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(model.model_rate == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // fit survives a nonpositive tail by using the positive prefix
  TrajectoryRecord truncated = record;
  for (int j = 9; j <= 15; ++j)
    truncated.rows[static_cast<std::size_t>(j - 1)].chain_excitation_expectation = 0.0;
  CHECK(fit_decay(truncated, record.layout).fitted_rate == doctest::Approx(0.8).epsilon(1e-9));

  TrajectoryRecord flat;
  flat.layout = record.layout;
  TrajectoryRow dead;
  dead.step = 1;
  dead.chain_excitation_expectation = 0.0;
  flat.rows.push_back(dead);
  CHECK_THROWS_AS(fit_decay(flat, record.layout), NumericalError);
}

TEST_CASE("the time-to-fidelity estimate uses the measured transit time") {
  TrajectoryRecord record;
  record.layout = {1, 4, 1};
  for (int j = 1; j <= 12; ++j) {
    TrajectoryRow row;
    row.step = j;
    row.chain_excitation_expectation = std::pow(0.7, j);
    record.rows.push_back(row);
  }
  const TimescaleModel model = fit_decay(record, record.layout, 3.0);
  const double expected = 6.0 * 3.0 * std::abs(std::log(0.1)) / 1.0;
  CHECK(model.time_to_fidelity(0.9) == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(model.time_to_fidelity(1.0), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay(record, record.layout).time_to_fidelity(0.9),
                  std::invalid_argument);
}

TEST_CASE("fidelity bound chain: model rate implies a success floor") {
  const ChainSpec spec = random_chain({2, 2, 2}, Model::Heisenberg, 0.5, 1.5, 7);
  const double te = estimate_Te(spec, 30.0, 0.05);
  const ProtocolSchedule schedule =
      optimize_schedule(spec, 15, te / 12.0, te, 16, preset_all_up(2));
  const SimulationResult res = simulate(spec, schedule, preset_all_up(2));
  const TimescaleModel model = fit_decay(res.record, spec.layout);

  if (model.fitted_rate <= model.model_rate) {
    for (const auto& row : res.record.rows) {
      const double floor = 1.0 - 2.0 * std::pow(model.model_rate, row.step);
      if (floor > 0.0) CHECK(row.success_prob >= floor - 1e-9);
    }
  }
}

TEST_CASE("greedy schedule finds the perfect-transfer swap on the engineered chain") {
  ChainSpec mirror;
  mirror.layout = {1, 4, 1};
  mirror.model = Model::XY;
  mirror.couplings = oracle::mirror_couplings(6);
  mirror.fields.assign(6, 0.0);

  const double t_star = std::numbers::pi / 2;
  // window whose upper endpoint is the perfect-transfer time
  const ProtocolSchedule schedule = optimize_schedule(mirror, 1, 0.3, t_star, 9);
  CHECK(schedule.taus[0] == doctest::Approx(t_star).epsilon(1e-12));
  const SimulationResult res = simulate(mirror, schedule, preset_all_up(1));
  CHECK(res.record.rows[0].success_prob >= 1.0 - 1e-9);
}

TEST_CASE("a zero-width window degenerates to the uniform schedule") {
  const ChainSpec spec = random_chain({1, 2, 1}, Model::XY, 0.5, 1.5, 3);
  const ProtocolSchedule schedule = optimize_schedule(spec, 4, 0.8, 0.8, 5);
  for (double tau : schedule.taus) CHECK(tau == 0.8);
  CHECK_THROWS_AS(optimize_schedule(spec, 0, 0.5, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(optimize_schedule(spec, 3, 0.0, 1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(optimize_schedule(spec, 3, 0.5, 1.0, 1), std::invalid_argument);
}

TEST_CASE("optimized schedules beat the uniform baseline on most chains") {
  int wins = 0;
  const int trials = 20;
  for (unsigned seed = 1; seed <= trials; ++seed) {
    const ChainSpec spec = random_chain({1, 3, 1}, Model::Heisenberg, 0.5, 1.5, seed);
    const int steps = 6;
    const ProtocolSchedule uniform = ProtocolSchedule::uniform(1.0, steps);
    const ProtocolSchedule tuned = optimize_schedule(spec, steps, 0.2, 2.0, 10);
    const double u = simulate(spec, uniform, preset_all_up(1)).record.rows.back().success_prob;
    const double o = simulate(spec, tuned, preset_all_up(1)).record.rows.back().success_prob;
    if (o >= u - 1e-12) ++wins;
  }
  CHECK(wins >= 16);  // 80 percent
}
