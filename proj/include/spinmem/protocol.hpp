#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "spinmem/hamiltonian.hpp"
#include "spinmem/propagator.hpp"

namespace spinmem {

// Exact joint-state simulation is refused past this total amplitude count.
inline constexpr std::size_t kMaxAmplitudes = 10'000'000;

struct ProtocolSchedule {
  std::vector<double> taus;  // tau_1 .. tau_j, all > 0

  static ProtocolSchedule uniform(double tau, int steps);
  int steps() const { return static_cast<int>(taus.size()); }
  void validate() const;  // throws std::invalid_argument
};

// Occupied memory-site indices, sorted ascending. Register i (1-based, the
// target of the i-th swap) owns memory sites [(i-1)*N_B, i*N_B).
using MemPattern = std::vector<std::uint16_t>;

// (chain excitation count, memory pattern). Every amplitude in the block sits
// in the chain sector with that excitation count; chain count + pattern
// weight is the conserved total of the input component the block belongs to.
using BlockKey = std::pair<int, MemPattern>;

// Exact state of chain + accumulated memory registers after some steps,
// stored blockwise by memory pattern. B is empty after every swap, so
// B-occupied chain amplitudes appear only transiently inside a step.
struct JointState {
  SiteLayout layout;
  int step = 0;
  std::map<BlockKey, Eigen::VectorXcd> blocks;

  double total_norm2() const;
  // Expected excitation count held in the memory registers.
  double memory_excitation_expectation() const;
};

struct TrajectoryRow {
  int step = 0;
  double tau = 0.0;
  double success_prob = 0.0;    // chain (A+C+B) fully de-excited
  double fidelity_bound = 0.0;  // see TrajectoryRecord
  std::vector<double> p_at_least;  // P_n = P(>= n excitations in A+C), n = 1..N_A
  double chain_excitation_expectation = 0.0;
  double b_occupancy_before_swap = 0.0;
};

// Per-step observables of a run. simulate() fills fidelity_bound with the
// vacuum-probability lower bound for its input; the CLI replaces the column
// with the input-independent worst-case bound from the stepwise transfer map.
struct TrajectoryRecord {
  SiteLayout layout;
  std::vector<TrajectoryRow> rows;
};

struct SimulationResult {
  JointState state;
  TrajectoryRecord record;
};

// Map from sender basis patterns to memory amplitudes with the chain
// projected on the all-down state, assembled column by column.
struct TransferMap {
  int steps = 0;
  int alice_dim = 0;
  std::vector<MemPattern> memory_states;  // row labels, sorted
  Eigen::MatrixXcd matrix;                // memory_states.size() x alice_dim
};

struct RecoveryMetrics {
  Eigen::VectorXd singular_values;  // alice_dim entries, descending, 0-padded
  double worst_case_fidelity_bound = 0.0;  // smallest singular value squared
  Eigen::MatrixXcd decoder;  // polar isometry factor, closest isometry to K
};

struct TransferRun {
  TransferMap final_map;
  std::vector<double> stepwise_worst_case_bound;  // one entry per step
};

// Shared machinery: sector spectra for chain excitation counts 0..max_n and
// the swap-and-evolve step. Instantiate one engine per worker thread; the
// propagator cache is not synchronized.
class ProtocolEngine {
 public:
  ProtocolEngine(ChainSpec spec, int max_excitations);

  const ChainSpec& chain() const { return spec_; }
  int max_excitations() const { return static_cast<int>(bases_.size()) - 1; }
  const SectorBasis& basis(int n) const { return bases_.at(n); }
  const Spectrum& spectrum(int n) const { return spectra_.at(n); }
  const Eigen::MatrixXcd& unitary(int n, double tau) const;

  // alice_input: 2^{N_A} amplitudes over sender patterns, normalized.
  JointState initial_state(const Eigen::VectorXcd& alice_input) const;

  // One protocol step: free evolution for tau, then swap of B into the next
  // fresh register. Returns the observables of the step.
  TrajectoryRow advance(JointState& state, double tau) const;

  // Expected B occupancy after evolving the current state by tau, without
  // committing the step (used by the schedule optimizer).
  double peek_b_occupancy(const JointState& state, double tau) const;

  double success_probability(const JointState& state) const;
  // Memory amplitudes of the chain-vacuum component.
  std::map<MemPattern, std::complex<double>> vacuum_amplitudes(const JointState& state) const;

 private:
  ChainSpec spec_;
  std::vector<SectorBasis> bases_;
  std::vector<Spectrum> spectra_;
  mutable std::map<std::pair<int, double>, Eigen::MatrixXcd> propagators_;
};

Eigen::VectorXcd preset_all_up(int n_a);
Eigen::VectorXcd preset_plus_state(int n_a);

// Exact protocol run for one sender input.
SimulationResult simulate(const ChainSpec& spec, const ProtocolSchedule& schedule,
                          const Eigen::VectorXcd& alice_input);

// 2^{N_A} basis runs assembled into the transfer map; the run variant also
// tracks the worst-case fidelity bound (smallest singular value squared)
// after every step.
TransferMap transfer_map(const ChainSpec& spec, const ProtocolSchedule& schedule);
TransferRun transfer_map_run(const ChainSpec& spec, const ProtocolSchedule& schedule);
std::vector<TransferMap> transfer_map_steps(const ChainSpec& spec,
                                            const ProtocolSchedule& schedule);

RecoveryMetrics recovery_metrics(const TransferMap& k);

// Closed forms for a single-site sender/receiver after one or two swaps.
double eta_direct(const ChainSpec& spec, double tau, int j);

// Q_n(j) = ||T_n^j||^2, the best possible probability of keeping n
// excitations in the chain across j steps. Q_0 = 1 exactly.
double survival_bound(const ChainSpec& spec, double tau, int n, int j);

}  // namespace spinmem
