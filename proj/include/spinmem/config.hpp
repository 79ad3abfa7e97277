#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "spinmem/hamiltonian.hpp"
#include "spinmem/protocol.hpp"

namespace spinmem {

#ifndef SPINMEM_VERSION
#define SPINMEM_VERSION "0.1.0"
#endif
inline constexpr const char* kVersion = SPINMEM_VERSION;

// Exactly one coupling source: an explicit list or a range plus seed.
struct ChainConfig {
  Model model = Model::Heisenberg;
  SiteLayout layout;
  std::optional<std::vector<double>> couplings;
  std::optional<std::pair<double, double>> coupling_range;
  std::optional<std::uint64_t> seed;
  std::vector<double> fields;  // empty means all zero
};

struct ScheduleConfig {
  enum class Kind { Uniform, Explicit, Optimized };
  Kind kind = Kind::Uniform;
  // uniform
  double tau = 1.0;
  int steps = 1;
  // explicit
  std::vector<double> taus;
  // optimized
  int opt_steps = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int grid_points = 0;
};

// Patterns are integers (or binary-literal strings) over the sender sites,
// site 0 being the least significant bit.
struct InputConfig {
  enum class Kind { AllUp, PlusState, Explicit };
  Kind kind = Kind::AllUp;
  std::vector<std::pair<std::uint32_t, std::complex<double>>> amplitudes;
};

struct AnalysisConfig {
  std::vector<double> tau_grid;
  std::vector<int> sectors;  // empty means 1..N_A
  double condition_tol = 1e-10;
};

struct SweepConfig {
  std::vector<std::uint64_t> seeds;
  std::vector<SiteLayout> layouts;  // empty means the chain layout only
};

struct ExperimentConfig {
  ChainConfig chain;
  ScheduleConfig schedule;
  InputConfig input;
  AnalysisConfig analysis;
  SweepConfig sweep;
  std::string out_dir = "out";
  std::vector<std::string> formats = {"csv", "json"};

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;  // normalized echo, reproduces the run
};

ChainSpec resolve_chain(const ChainConfig& cfg, std::optional<std::uint64_t> seed_override);

// Builds the sender state. Norm deviations up to 1e-9 are normalized
// silently, up to 1e-3 with a warning, beyond that the config is rejected.
Eigen::VectorXcd resolve_input(const InputConfig& cfg, int n_a);

ProtocolSchedule resolve_schedule(const ScheduleConfig& cfg, const ChainSpec& chain,
                                  const Eigen::VectorXcd& alice_input);

}  // namespace spinmem
