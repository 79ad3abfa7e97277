#include "spinmem/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinmem/errors.hpp"
#include "spinmem/io.hpp"

namespace spinmem {

// ---------------------------------------------------------------------------
// spectral radius
// ---------------------------------------------------------------------------

SpectralRadiusResult spectral_radius_checked(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: matrix not square");
  SpectralRadiusResult res;
  if (m.rows() == 0) return res;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  res.eigensolver_ok = (solver.info() == Eigen::Success);
  if (res.eigensolver_ok) res.rho = solver.eigenvalues().cwiseAbs().maxCoeff();

  // Gelfand sequence ||T^{2^k}||^{1/2^k} via normalized squaring. The raw
  // value carries a conditioning prefactor that dies only as its 2^k-th root,
  // so the working estimate is the consecutive-norm ratio, where the
  // prefactor cancels, with Aitken acceleration on the log sequence.
  double norm = operator_norm(m);
  res.gelfand = norm;
  if (norm == 0.0) {
    if (!res.eigensolver_ok) res.rho = 0.0;
    res.consistent = !res.eigensolver_ok || std::abs(res.rho) <= 1e-6;
    return res;
  }
  Eigen::MatrixXcd cur = m / norm;
  double log_prev = std::log(norm);  // log ||T^{2^{k-1}}||
  double log_scale = log_prev;       // cur = T^{2^{k-1}} / exp(log_scale)
  double ratio_hist[3] = {0, 0, 0};  // last log-ratio estimates
  int ratios = 0;
  res.consistent = false;
  for (int k = 1; k <= 10 && !res.consistent; ++k) {
    cur = cur * cur;  // T^{2^k} / exp(2 log_scale)
    const double nn = operator_norm(cur);
    if (nn == 0.0) {
      res.gelfand = 0.0;
      res.consistent = !res.eigensolver_ok || std::abs(res.rho) <= 1e-6;
      if (!res.eigensolver_ok) res.rho = 0.0;
      return res;
    }
    const double log_cur = 2.0 * log_scale + std::log(nn);
    cur /= nn;
    log_scale = log_cur;
    const double log_ratio = (log_cur - log_prev) / std::exp2(k - 1);
    log_prev = log_cur;

    ratio_hist[0] = ratio_hist[1];
    ratio_hist[1] = ratio_hist[2];
    ratio_hist[2] = log_ratio;
    ++ratios;

    res.gelfand = std::exp(log_ratio);
    if (res.eigensolver_ok && std::abs(res.gelfand - res.rho) <= 1e-6) {
      res.consistent = true;
      break;
    }
    if (ratios >= 3) {
      const double d1 = ratio_hist[2] - ratio_hist[1];
      const double d2 = ratio_hist[1] - ratio_hist[0];
      const double denom = d1 - d2;
      if (std::abs(denom) > 1e-300) {
        const double accel = std::exp(ratio_hist[2] - d1 * d1 / denom);
        if (std::isfinite(accel) && accel >= 0.0 &&
            std::abs(accel - res.gelfand) < 0.1 * std::max(1.0, res.gelfand)) {
          res.gelfand = accel;
          if (res.eigensolver_ok && std::abs(accel - res.rho) <= 1e-6) res.consistent = true;
        }
      }
    }
  }
  if (!res.eigensolver_ok) {
    res.rho = res.gelfand;  // fallback
    res.consistent = false;
  }
  return res;
}

double spectral_radius(const Eigen::MatrixXcd& m) {
  const SpectralRadiusResult res = spectral_radius_checked(m);
  if (!res.eigensolver_ok)
    throw NumericalError("spectral_radius: eigenvalue iteration failed; Gelfand fallback " +
                         format_double(res.gelfand));
  return res.rho;
}

double spectral_radius(const SectorContraction& t) { return spectral_radius(t.matrix); }

// ---------------------------------------------------------------------------
// factorizing-eigenstate condition
// ---------------------------------------------------------------------------

ConditionReport check_condition(const ChainSpec& spec, int n, double tol) {
  if (n < 1) throw std::invalid_argument("check_condition: sector must be >= 1");
  if (n > spec.layout.total())
    throw std::invalid_argument("check_condition: sector does not exist");

  const Spectrum sp = diagonalize(build_chain(spec, n));
  const std::size_t dim = sp.basis.dim();
  const std::uint32_t b_mask = spec.layout.b_mask();

  std::vector<Eigen::Index> occupied_rows;  // basis states with >= 1 B excitation
  for (std::size_t k = 0; k < dim; ++k)
    if (sp.basis.state(k) & b_mask) occupied_rows.push_back(static_cast<Eigen::Index>(k));

  ConditionReport report;
  report.sector = n;
  report.tolerance = tol;
  report.worst_b_weight = 1.0;

  const double span = (dim > 1) ? sp.eigenvalues[dim - 1] - sp.eigenvalues[0] : 0.0;
  const double gap_tol = 1e-9 * std::max(1.0, span);

  std::size_t i = 0;
  while (i < dim) {
    std::size_t j = i + 1;
    while (j < dim && sp.eigenvalues[j] - sp.eigenvalues[j - 1] <= gap_tol) ++j;
    const Eigen::Index g = static_cast<Eigen::Index>(j - i);

    // Smallest B-excitation weight reachable inside the eigenspace: the
    // squared smallest singular value of the B-occupied row block.
    double weight;
    if (occupied_rows.empty()) {
      weight = 0.0;
    } else {
      Eigen::MatrixXcd restricted(static_cast<Eigen::Index>(occupied_rows.size()), g);
      for (std::size_t r = 0; r < occupied_rows.size(); ++r)
        restricted.row(static_cast<Eigen::Index>(r)) =
            sp.eigenvectors.block(occupied_rows[r], static_cast<Eigen::Index>(i), 1, g);
      if (restricted.rows() < g) {
        weight = 0.0;  // rank-deficient by shape: some combination is annihilated
      } else {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(restricted);
        const double smin = svd.singularValues()[svd.singularValues().size() - 1];
        weight = smin * smin;
      }
    }

    if (weight < report.worst_b_weight) {
      report.worst_b_weight = weight;
      if (weight < tol) report.offending_eigenvalue = sp.eigenvalues[static_cast<Eigen::Index>(i)];
    }
    i = j;
  }

  report.violated = report.worst_b_weight < tol;
  if (!report.violated) report.offending_eigenvalue.reset();
  return report;
}

std::vector<TauScanPoint> scan_tau(const ChainSpec& spec, int n,
                                   const std::vector<double>& tau_grid) {
  if (tau_grid.empty()) throw std::invalid_argument("scan_tau: empty grid");
  for (double t : tau_grid)
    if (!(t > 0.0)) throw std::invalid_argument("scan_tau: grid values must be positive");

  const Spectrum sp = diagonalize(build_chain(spec, n));
  std::vector<TauScanPoint> curve;
  curve.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    const SectorContraction t = build_T(evolve(sp, tau), spec.layout);
    const double rho = spectral_radius_checked(t.matrix).rho;
    curve.push_back({tau, rho, rho >= 1.0 - 1e-8});
  }
  return curve;
}

// ---------------------------------------------------------------------------
// time scales
// ---------------------------------------------------------------------------

double estimate_Te(const ChainSpec& spec, double t_max, double dt) {
  if (!(t_max > 0.0)) throw std::invalid_argument("estimate_Te: t_max must be positive");
  if (!(dt > 0.0) || dt > t_max)
    throw std::invalid_argument("estimate_Te: dt must be in (0, t_max]");

  const Spectrum sp = diagonalize(build_chain(spec, 1));
  const int sites = spec.layout.total();
  const int b_first = spec.layout.b_first();

  // amplitude on site s at time t: sum_k V(s,k) e^{-i E_k t} conj(V(0,k))
  const Eigen::MatrixXcd& v = sp.eigenvectors;
  const std::size_t samples = static_cast<std::size_t>(t_max / dt + 1e-9);
  double best_occ = -1.0;
  double best_t = dt;
  std::size_t best_idx = 0;
  for (std::size_t i = 1; i <= samples; ++i) {
    const double t = static_cast<double>(i) * dt;
    double occ = 0.0;
    for (int s = b_first; s < sites; ++s) {
      std::complex<double> amp = 0.0;
      for (int k = 0; k < sites; ++k) {
        const double a = -sp.eigenvalues[k] * t;
        amp += v(s, k) * std::complex<double>(std::cos(a), std::sin(a)) * std::conj(v(0, k));
      }
      occ += std::norm(amp);
    }
    if (occ > best_occ) {
      best_occ = occ;
      best_t = t;
      best_idx = i;
    }
  }
  if (best_occ < 1e-12)
    throw NumericalError("estimate_Te: no excitation ever reaches the receiver block");
  if (best_idx == samples)
    warn("estimate_Te: occupancy still rising at t_max; transit time may be underestimated");
  return best_t;
}

TimescaleModel fit_decay(const TrajectoryRecord& record, const SiteLayout& layout,
                         double transit_time) {
  std::vector<double> xs, ys;
  for (const auto& row : record.rows) {
    if (!(row.chain_excitation_expectation > 1e-14)) break;  // positive prefix only
    xs.push_back(static_cast<double>(row.step));
    ys.push_back(std::log(row.chain_excitation_expectation));
  }
  if (xs.size() < 2)
    throw NumericalError("fit_decay: fewer than two positive excitation samples");

  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  TimescaleModel model;
  model.layout = layout;
  model.transit_time = transit_time;
  model.fitted_rate = std::exp(slope);
  model.model_rate = 1.0 - static_cast<double>(layout.n_b) / layout.total();
  if (!(model.fitted_rate > 0.0 && model.fitted_rate < 1.0))
    warn("fit_decay: fitted rate " + format_double(model.fitted_rate) +
         " outside (0,1); the record does not decay geometrically");
  return model;
}

TimescaleModel fit_decay(const TrajectoryRecord& record, const SiteLayout& layout) {
  return fit_decay(record, layout, std::numeric_limits<double>::quiet_NaN());
}

double TimescaleModel::time_to_fidelity(double f) const {
  if (!(transit_time > 0.0))
    throw std::invalid_argument("time_to_fidelity: needs a measured transit time");
  if (!(f > 0.0 && f < 1.0))
    throw std::invalid_argument("time_to_fidelity: fidelity must lie in (0,1)");
  const double ln_na = std::log(static_cast<double>(layout.n_a));
  return layout.total() * transit_time * (ln_na + std::abs(std::log1p(-f))) / layout.n_b;
}

// ---------------------------------------------------------------------------
// schedule optimization
// ---------------------------------------------------------------------------

ProtocolSchedule optimize_schedule(const ChainSpec& spec, int steps, double tau_lo,
                                   double tau_hi, int grid_points,
                                   const Eigen::VectorXcd& alice_input) {
  if (steps < 1) throw std::invalid_argument("optimize_schedule: need at least one step");
  if (!(tau_lo > 0.0)) throw std::invalid_argument("optimize_schedule: tau_lo must be positive");
  if (!(tau_hi >= tau_lo)) throw std::invalid_argument("optimize_schedule: empty window");
  if (grid_points < 2) throw std::invalid_argument("optimize_schedule: need >= 2 grid points");

  std::vector<double> grid(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i)
    grid[static_cast<std::size_t>(i)] =
        tau_lo + (tau_hi - tau_lo) * static_cast<double>(i) / (grid_points - 1);

  int max_n = 0;
  for (Eigen::Index x = 0; x < alice_input.size(); ++x)
    if (alice_input[x] != std::complex<double>(0.0, 0.0))
      max_n = std::max(max_n, std::popcount(static_cast<std::uint32_t>(x)));

  ProtocolEngine engine(spec, max_n);
  JointState state = engine.initial_state(alice_input);

  ProtocolSchedule schedule;
  schedule.taus.reserve(static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) {
    double best_tau = grid.front();
    double best_occ = -1.0;
    for (double tau : grid) {  // ascending, strict > keeps the smallest tau on ties
      const double occ = engine.peek_b_occupancy(state, tau);
      if (occ > best_occ) {
        best_occ = occ;
        best_tau = tau;
      }
    }
    engine.advance(state, best_tau);
    schedule.taus.push_back(best_tau);
  }
  return schedule;
}

ProtocolSchedule optimize_schedule(const ChainSpec& spec, int steps, double tau_lo,
                                   double tau_hi, int grid_points) {
  return optimize_schedule(spec, steps, tau_lo, tau_hi, grid_points,
                           preset_all_up(spec.layout.n_a));
}

}  // namespace spinmem
