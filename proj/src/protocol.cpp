#include "spinmem/protocol.hpp"

#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

#include "spinmem/errors.hpp"
#include "spinmem/io.hpp"

namespace spinmem {

ProtocolSchedule ProtocolSchedule::uniform(double tau, int steps) {
  if (steps < 1) throw std::invalid_argument("schedule: need at least one step");
  ProtocolSchedule s;
  s.taus.assign(static_cast<std::size_t>(steps), tau);
  s.validate();
  return s;
}

void ProtocolSchedule::validate() const {
  if (taus.empty()) throw std::invalid_argument("schedule: need at least one step");
  for (double t : taus)
    if (!(t > 0.0) || !std::isfinite(t))
      throw std::invalid_argument("schedule: every interval must be positive and finite");
}

double JointState::total_norm2() const {
  double s = 0.0;
  for (const auto& [key, amps] : blocks) s += amps.squaredNorm();
  return s;
}

double JointState::memory_excitation_expectation() const {
  double s = 0.0;
  for (const auto& [key, amps] : blocks)
    s += static_cast<double>(key.second.size()) * amps.squaredNorm();
  return s;
}

// ---------------------------------------------------------------------------
// engine
// ---------------------------------------------------------------------------

ProtocolEngine::ProtocolEngine(ChainSpec spec, int max_excitations) : spec_(std::move(spec)) {
  spec_.validate();
  const int sites = spec_.layout.total();
  if (max_excitations < 0 || max_excitations > sites)
    throw std::invalid_argument("engine: excitation cap out of range");
  for (int n = 0; n <= max_excitations; ++n) {
    // size check before any dense allocation
    const std::int64_t dim = binomial(sites, n);
    if (dim > static_cast<std::int64_t>(kMaxSectorDim))
      throw ResourceError("sector " + std::to_string(n) + " has dimension " +
                          std::to_string(dim) +
                          " beyond the dense cap; use survival-bound mode instead");
    SectorHamiltonian h = build_chain(spec_, n);
    bases_.push_back(h.basis);
    spectra_.push_back(diagonalize(h));
  }
}

const Eigen::MatrixXcd& ProtocolEngine::unitary(int n, double tau) const {
  const auto key = std::make_pair(n, tau);
  auto it = propagators_.find(key);
  if (it != propagators_.end()) return it->second;
  SectorUnitary u = evolve(spectra_.at(n), tau);
  return propagators_.emplace(key, std::move(u.matrix)).first->second;
}

JointState ProtocolEngine::initial_state(const Eigen::VectorXcd& alice_input) const {
  const int n_a = spec_.layout.n_a;
  if (alice_input.size() != (Eigen::Index{1} << n_a))
    throw std::invalid_argument("initial_state: input needs 2^{N_A} amplitudes");
  if (std::abs(alice_input.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("initial_state: input is not normalized");

  JointState st;
  st.layout = spec_.layout;
  for (std::uint32_t x = 0; x < (1u << n_a); ++x) {
    const std::complex<double> a = alice_input[x];
    if (a == std::complex<double>(0.0, 0.0)) continue;
    const int n = std::popcount(x);
    if (n > max_excitations())
      throw std::invalid_argument("initial_state: engine built for fewer excitations");
    auto [it, fresh] = st.blocks.try_emplace(BlockKey{n, MemPattern{}});
    if (fresh) it->second = Eigen::VectorXcd::Zero(bases_[n].dim());
    // sender sites are the low bits, so the chain pattern is x itself
    it->second[bases_[n].index_of(x)] += a;
  }
  return st;
}

TrajectoryRow ProtocolEngine::advance(JointState& state, double tau) const {
  const SiteLayout& layout = spec_.layout;
  const std::uint32_t b_mask = layout.b_mask();
  const int b_first = layout.b_first();
  const int reg = state.step;  // 0-based index of the fresh register

  double b_occupancy = 0.0;
  std::map<BlockKey, Eigen::VectorXcd> next;
  std::size_t total_amps = 0;

  for (const auto& [key, amps] : state.blocks) {
    const int n = key.first;
    const SectorBasis& basis = bases_.at(n);
    const Eigen::VectorXcd evolved = unitary(n, tau) * amps;

    for (std::size_t s = 0; s < basis.dim(); ++s) {
      const std::uint32_t p = basis.state(s);
      const std::uint32_t b_bits = p & b_mask;
      const int bw = std::popcount(b_bits);
      const double w = std::norm(evolved[s]);
      b_occupancy += w * bw;

      // swap: B occupation moves verbatim into the fresh register
      BlockKey dest_key{n - bw, key.second};
      for (int k = 0; k < layout.n_b; ++k)
        if (b_bits & (1u << (b_first + k)))
          dest_key.second.push_back(static_cast<std::uint16_t>(reg * layout.n_b + k));

      auto [it, fresh] = next.try_emplace(std::move(dest_key));
      if (fresh) {
        it->second = Eigen::VectorXcd::Zero(bases_.at(n - bw).dim());
        total_amps += bases_.at(n - bw).dim();
        if (total_amps > kMaxAmplitudes)
          throw ResourceError("joint state exceeds " + std::to_string(kMaxAmplitudes) +
                              " amplitudes; use survival-bound mode instead");
      }
      it->second[bases_.at(n - bw).index_of(p & ~b_mask)] += evolved[s];
    }
  }

  state.blocks = std::move(next);
  state.step += 1;

  TrajectoryRow row;
  row.step = state.step;
  row.tau = tau;
  row.p_at_least.assign(static_cast<std::size_t>(layout.n_a), 0.0);
  double total = 0.0;
  for (const auto& [key, amps] : state.blocks) {
    const double w = amps.squaredNorm();
    total += w;
    if (key.first == 0) row.success_prob += w;
    row.chain_excitation_expectation += key.first * w;
    for (int n = 1; n <= std::min(key.first, layout.n_a); ++n)
      row.p_at_least[static_cast<std::size_t>(n - 1)] += w;
  }
  // report probabilities relative to the state norm so that unit-modulus
  // phase roundoff cannot push them outside [0, 1]
  const auto clamp01 = [](double x) { return std::min(1.0, std::max(0.0, x)); };
  row.success_prob = clamp01(row.success_prob / total);
  for (double& p : row.p_at_least) p = clamp01(p / total);
  row.chain_excitation_expectation = std::max(0.0, row.chain_excitation_expectation / total);
  row.b_occupancy_before_swap = std::max(0.0, b_occupancy / total);
  row.fidelity_bound = row.success_prob;
  return row;
}

double ProtocolEngine::peek_b_occupancy(const JointState& state, double tau) const {
  const std::uint32_t b_mask = spec_.layout.b_mask();
  double occ = 0.0;
  for (const auto& [key, amps] : state.blocks) {
    if (key.first == 0) continue;
    const SectorBasis& basis = bases_.at(key.first);
    const Eigen::VectorXcd evolved = unitary(key.first, tau) * amps;
    for (std::size_t s = 0; s < basis.dim(); ++s) {
      const int bw = std::popcount(basis.state(s) & b_mask);
      if (bw) occ += std::norm(evolved[s]) * bw;
    }
  }
  return occ;
}

double ProtocolEngine::success_probability(const JointState& state) const {
  double s = 0.0;
  for (const auto& [key, amps] : state.blocks)
    if (key.first == 0) s += amps.squaredNorm();
  return s;
}

std::map<MemPattern, std::complex<double>> ProtocolEngine::vacuum_amplitudes(
    const JointState& state) const {
  std::map<MemPattern, std::complex<double>> out;
  for (const auto& [key, amps] : state.blocks)
    if (key.first == 0) out[key.second] = amps[0];
  return out;
}

// ---------------------------------------------------------------------------
// runs
// ---------------------------------------------------------------------------

Eigen::VectorXcd preset_all_up(int n_a) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_a);
  v[v.size() - 1] = 1.0;
  return v;
}

Eigen::VectorXcd preset_plus_state(int n_a) {
  const Eigen::Index dim = Eigen::Index{1} << n_a;
  return Eigen::VectorXcd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
}

SimulationResult simulate(const ChainSpec& spec, const ProtocolSchedule& schedule,
                          const Eigen::VectorXcd& alice_input) {
  schedule.validate();
  int max_n = 0;
  for (Eigen::Index x = 0; x < alice_input.size(); ++x)
    if (alice_input[x] != std::complex<double>(0.0, 0.0))
      max_n = std::max(max_n, std::popcount(static_cast<std::uint32_t>(x)));

  ProtocolEngine engine(spec, max_n);
  SimulationResult result{engine.initial_state(alice_input), TrajectoryRecord{spec.layout, {}}};
  result.record.rows.reserve(schedule.taus.size());
  for (double tau : schedule.taus)
    result.record.rows.push_back(engine.advance(result.state, tau));
  return result;
}

namespace {

// columns = vacuum-projected memory amplitudes, one map per sender pattern
TransferMap assemble_map(int steps, int alice_dim,
                         const std::vector<std::map<MemPattern, std::complex<double>>>& cols) {
  std::set<MemPattern> patterns;
  for (const auto& col : cols)
    for (const auto& [mem, amp] : col) patterns.insert(mem);

  TransferMap k;
  k.steps = steps;
  k.alice_dim = alice_dim;
  k.memory_states.assign(patterns.begin(), patterns.end());
  k.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(k.memory_states.size()), alice_dim);
  for (int x = 0; x < alice_dim; ++x) {
    for (std::size_t r = 0; r < k.memory_states.size(); ++r) {
      auto it = cols[static_cast<std::size_t>(x)].find(k.memory_states[r]);
      if (it != cols[static_cast<std::size_t>(x)].end())
        k.matrix(static_cast<Eigen::Index>(r), x) = it->second;
    }
  }
  return k;
}

double gram_min_eigenvalue(const std::vector<std::map<MemPattern, std::complex<double>>>& cols) {
  const int n = static_cast<int>(cols.size());
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(n, n);
  std::set<MemPattern> patterns;
  for (const auto& col : cols)
    for (const auto& [mem, amp] : col) patterns.insert(mem);
  for (const auto& mem : patterns) {
    Eigen::VectorXcd row = Eigen::VectorXcd::Zero(n);
    for (int x = 0; x < n; ++x) {
      auto it = cols[static_cast<std::size_t>(x)].find(mem);
      if (it != cols[static_cast<std::size_t>(x)].end()) row[x] = it->second;
    }
    gram += row.conjugate() * row.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  return std::max(0.0, es.eigenvalues().minCoeff());
}

}  // namespace

TransferRun transfer_map_run(const ChainSpec& spec, const ProtocolSchedule& schedule) {
  schedule.validate();
  const int n_a = spec.layout.n_a;
  const int alice_dim = 1 << n_a;

  ProtocolEngine engine(spec, n_a);
  std::vector<JointState> states;
  states.reserve(static_cast<std::size_t>(alice_dim));
  for (int x = 0; x < alice_dim; ++x) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(alice_dim);
    e[x] = 1.0;
    states.push_back(engine.initial_state(e));
  }

  TransferRun run;
  std::vector<std::map<MemPattern, std::complex<double>>> cols(
      static_cast<std::size_t>(alice_dim));
  for (double tau : schedule.taus) {
    for (int x = 0; x < alice_dim; ++x) {
      engine.advance(states[static_cast<std::size_t>(x)], tau);
      cols[static_cast<std::size_t>(x)] =
          engine.vacuum_amplitudes(states[static_cast<std::size_t>(x)]);
    }
    run.stepwise_worst_case_bound.push_back(gram_min_eigenvalue(cols));
  }
  run.final_map = assemble_map(schedule.steps(), alice_dim, cols);
  return run;
}

TransferMap transfer_map(const ChainSpec& spec, const ProtocolSchedule& schedule) {
  return transfer_map_run(spec, schedule).final_map;
}

std::vector<TransferMap> transfer_map_steps(const ChainSpec& spec,
                                            const ProtocolSchedule& schedule) {
  schedule.validate();
  const int n_a = spec.layout.n_a;
  const int alice_dim = 1 << n_a;

  ProtocolEngine engine(spec, n_a);
  std::vector<JointState> states;
  for (int x = 0; x < alice_dim; ++x) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(alice_dim);
    e[x] = 1.0;
    states.push_back(engine.initial_state(e));
  }

  std::vector<TransferMap> maps;
  std::vector<std::map<MemPattern, std::complex<double>>> cols(
      static_cast<std::size_t>(alice_dim));
  int step = 0;
  for (double tau : schedule.taus) {
    ++step;
    for (int x = 0; x < alice_dim; ++x) {
      engine.advance(states[static_cast<std::size_t>(x)], tau);
      cols[static_cast<std::size_t>(x)] =
          engine.vacuum_amplitudes(states[static_cast<std::size_t>(x)]);
    }
    maps.push_back(assemble_map(step, alice_dim, cols));
  }
  return maps;
}

RecoveryMetrics recovery_metrics(const TransferMap& k) {
  const Eigen::Index rows = k.matrix.rows();
  const Eigen::Index cols = k.matrix.cols();
  RecoveryMetrics m;
  m.singular_values = Eigen::VectorXd::Zero(cols);
  if (rows == 0) {
    m.decoder = Eigen::MatrixXcd::Zero(rows, cols);
    return m;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(k.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  m.singular_values.head(sv.size()) = sv;
  // K = W P with W the closest isometry (polar factor); W^dagger K is PSD
  m.decoder = svd.matrixU() * svd.matrixV().adjoint();
  const double smin = (rows >= cols) ? sv[sv.size() - 1] : 0.0;
  m.worst_case_fidelity_bound = smin * smin;
  return m;
}

double eta_direct(const ChainSpec& spec, double tau, int j) {
  if (spec.layout.n_a != 1 || spec.layout.n_b != 1)
    throw std::invalid_argument("eta_direct: closed forms require N_A = N_B = 1");
  if (j != 1 && j != 2)
    throw std::invalid_argument("eta_direct: only the one- and two-swap forms exist");

  const Spectrum sp = diagonalize(build_chain(spec, 1));
  const Eigen::MatrixXcd u = evolve(sp, tau).matrix;
  const int sites = spec.layout.total();
  // single-excitation ordinals coincide with site indices
  const Eigen::Index b = sites - 1;
  const std::complex<double> direct = u(b, 0);
  if (j == 1) return std::norm(direct);

  std::complex<double> relay = 0.0;
  for (Eigen::Index l = 0; l < b; ++l) relay += u(b, l) * u(l, 0);
  return std::norm(direct) + std::norm(relay);
}

double survival_bound(const ChainSpec& spec, double tau, int n, int j) {
  if (n < 0) throw std::invalid_argument("survival_bound: negative excitation count");
  if (j < 0) throw std::invalid_argument("survival_bound: negative step count");
  if (n > spec.layout.total())
    throw std::invalid_argument("survival_bound: sector does not exist");
  if (n == 0) return 1.0;  // the vacuum never loses excitations

  const int free_sites = spec.layout.n_a + spec.layout.n_c;
  if (binomial(free_sites, n) == 0) return 0.0;  // no B-empty state can hold n
  if (j == 0) return 1.0;
  if (binomial(spec.layout.total(), n) > static_cast<std::int64_t>(kMaxSectorDim))
    throw ResourceError("sector " + std::to_string(n) +
                        " is beyond the dense cap even for survival bounds");

  const SectorContraction t =
      build_T(evolve(diagonalize(build_chain(spec, n)), tau), spec.layout);
  const double norm = operator_norm(contraction_power(t, j));
  return norm * norm;
}

}  // namespace spinmem
