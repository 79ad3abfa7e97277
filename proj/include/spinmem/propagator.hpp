#pragma once

#include <Eigen/Dense>

#include "spinmem/hamiltonian.hpp"
#include "spinmem/sector_basis.hpp"

namespace spinmem {

// Matrix powers past this count are refused.
inline constexpr int kMaxPowerSteps = 10000;

struct SectorUnitary {
  SectorBasis basis;
  Eigen::MatrixXcd matrix;  // U_n(tau), unitary to 1e-10
  double tau = 0.0;
};

// Projected propagator |0><0|_B U_n, stored as its square sub-block on the
// B-empty states of the sector (same nonzero spectrum as the projected full
// form, smaller powers). sub_index maps sub-block rows back to parent
// ordinals.
struct SectorContraction {
  SectorBasis basis;                   // full-chain sector basis
  std::vector<std::size_t> sub_index;  // parent ordinals of B-empty states
  Eigen::MatrixXcd matrix;             // sub_index.size() square
  double tau = 0.0;
};

// U_n(tau) = V exp(-i E tau) V^dagger from a sector spectrum.
SectorUnitary evolve(const Spectrum& spectrum, double tau);

SectorContraction build_T(const SectorUnitary& u, const SiteLayout& layout);

// Largest singular value.
double operator_norm(const Eigen::MatrixXcd& m);

// T^j by sequential multiplication (contraction keeps this benign).
Eigen::MatrixXcd contraction_power(const SectorContraction& t, int j);

Eigen::VectorXcd apply(const SectorUnitary& u, const Eigen::VectorXcd& v);

// Accepts either a sub-block-sized vector (plain product) or a full
// sector-sized vector, which is projected on the B-empty states, propagated,
// and embedded back (the action of Pi_B0 U Pi_B0).
Eigen::VectorXcd apply(const SectorContraction& t, const Eigen::VectorXcd& v);

}  // namespace spinmem
