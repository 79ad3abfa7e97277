#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinmem/sector_basis.hpp"

namespace spinmem {

// Dense sector matrices past this dimension are refused.
inline constexpr std::size_t kMaxSectorDim = 4096;

enum class Model { Heisenberg, XY };

std::string model_name(Model m);
Model model_from_name(const std::string& name);  // throws on unknown name

// Open chain with nearest-neighbor exchange couplings J_i (bond i joins sites
// i and i+1) and local z-fields B_i. Units: energies in J, times in 1/J,
// hbar = 1. Convention: the exchange part contributes the hopping element
// <..01..|H|..10..> = J_i in every excitation sector; the Heisenberg model
// adds the diagonal sum J_i z_i z_{i+1} and fields add B_i z_i, z = +-1/2.
struct ChainSpec {
  SiteLayout layout;
  Model model = Model::Heisenberg;
  std::vector<double> couplings;  // size N-1
  std::vector<double> fields;     // size N, zero-filled by default
  std::optional<std::uint64_t> rng_seed;  // provenance of random couplings

  void validate() const;          // throws std::invalid_argument
  bool connected() const;         // every J_i != 0
};

struct SectorHamiltonian {
  SectorBasis basis;
  Eigen::MatrixXcd matrix;  // Hermitian, dim = basis.dim()
};

struct Spectrum {
  SectorBasis basis;
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // orthonormal columns
};

// Restriction of the chain Hamiltonian to the n-excitation sector.
// A zero coupling merely disconnects the chain; it is reported as a warning
// because the condition checker needs such chains as inputs.
SectorHamiltonian build_chain(const ChainSpec& spec, int n);

// Couplings i.i.d. uniform on [lo, hi] from a seeded mt19937_64, bit-stable
// across platforms. Fields are zero.
ChainSpec random_chain(const SiteLayout& layout, Model model, double lo, double hi,
                       std::uint64_t seed);

// Hermitian eigendecomposition with input-symmetry check (1e-12 elementwise)
// and reconstruction check (1e-10 max-norm).
Spectrum diagonalize(const SectorHamiltonian& h);

}  // namespace spinmem
