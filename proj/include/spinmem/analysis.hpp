#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "spinmem/hamiltonian.hpp"
#include "spinmem/propagator.hpp"
#include "spinmem/protocol.hpp"

namespace spinmem {

// Cross-checked spectral radius. gelfand is the estimate extracted from the
// ||T^{2^k}|| sequence (consecutive-norm ratios, Aitken-accelerated); it
// cannot certify 1e-6 when the two largest eigenvalue moduli tie, which is
// structural for zero-field chains, so `consistent` carries the flag instead
// of an error. A failed eigensolver leaves rho set to the gelfand fallback.
struct SpectralRadiusResult {
  double rho = 0.0;
  double gelfand = 0.0;
  bool consistent = true;      // |rho - gelfand| <= 1e-6 within k <= 10
  bool eigensolver_ok = true;
};

SpectralRadiusResult spectral_radius_checked(const Eigen::MatrixXcd& m);
double spectral_radius(const Eigen::MatrixXcd& m);
double spectral_radius(const SectorContraction& t);

// Sector-n certificate: no eigenvector of H_n may live entirely on B-empty
// basis states. Degenerate eigenvalue groups are tested as subspaces, so a
// factorizing combination inside a multiplet is still caught.
struct ConditionReport {
  int sector = 0;
  bool violated = false;
  double worst_b_weight = 1.0;  // min over eigenspaces of the B-excitation weight
  std::optional<double> offending_eigenvalue;
  double tolerance = 1e-10;
};

ConditionReport check_condition(const ChainSpec& spec, int n, double tol = 1e-10);

struct TauScanPoint {
  double tau = 0.0;
  double rho = 0.0;
  bool degenerate = false;  // rho >= 1 - 1e-8
};

std::vector<TauScanPoint> scan_tau(const ChainSpec& spec, int n,
                                   const std::vector<double>& tau_grid);

// Transit time of a single excitation from site 0: argmax over the sampled
// grid (dt, 2dt, ..., <= t_max) of the B-region occupation probability.
double estimate_Te(const ChainSpec& spec, double t_max, double dt);

struct TimescaleModel {
  SiteLayout layout;
  double transit_time = 0.0;  // T_e; NaN when not measured
  double fitted_rate = 0.0;   // r from the log-linear fit
  double model_rate = 0.0;    // 1 - N_B/N

  // N T_e (ln N_A + |ln(1-F)|) / N_B; requires a measured transit time.
  double time_to_fidelity(double f) const;
};

// Log-linear least squares of the expected A+C excitation count against the
// step index, restricted to the positive prefix of the record.
TimescaleModel fit_decay(const TrajectoryRecord& record, const SiteLayout& layout);
TimescaleModel fit_decay(const TrajectoryRecord& record, const SiteLayout& layout,
                         double transit_time);

// Greedy schedule search: per step, the grid point maximizing the expected B
// occupancy just before the swap, ties resolved toward the smaller tau.
ProtocolSchedule optimize_schedule(const ChainSpec& spec, int steps, double tau_lo,
                                   double tau_hi, int grid_points,
                                   const Eigen::VectorXcd& alice_input);
ProtocolSchedule optimize_schedule(const ChainSpec& spec, int steps, double tau_lo,
                                   double tau_hi, int grid_points);

}  // namespace spinmem
