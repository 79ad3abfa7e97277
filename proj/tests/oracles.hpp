#pragma once

// Brute-force reference implementations used only by the test suites. These
// work in the full 2^N (or 2^{N + memory}) space via explicit tensor
// products, independent of the sector-decomposed code paths they check.

#include <Eigen/Dense>
#include <vector>

#include "spinmem/hamiltonian.hpp"
#include "spinmem/protocol.hpp"

namespace spinmem::testing {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// op acting on `site` of an n_sites register, site 0 = least significant bit.
Eigen::MatrixXcd site_operator(const Eigen::Matrix2cd& op, int site, int n_sites);

// Full 2^N Hamiltonian assembled from tensor products of single-site
// operators, same coupling conventions as build_chain.
Eigen::MatrixXcd full_hamiltonian(const ChainSpec& spec);

// Scaling-and-squaring Taylor exponential.
Eigen::MatrixXcd expm_taylor(const Eigen::MatrixXcd& a);

// exp(-i t H_full) through the Taylor route.
Eigen::MatrixXcd full_unitary(const ChainSpec& spec, double t);

// Protocol on the explicit 2^{N + steps*N_B} chain+memory register: dense
// chain evolution followed by bit-permutation swaps.
Eigen::VectorXcd full_protocol_state(const ChainSpec& spec, const ProtocolSchedule& schedule,
                                     const Eigen::VectorXcd& alice_input);

// Blockwise joint state mapped into the same full register for comparison.
Eigen::VectorXcd embed_joint_state(const JointState& state, int mem_site_count);

// J_i = sqrt(i (N - i)), the mirror-symmetric perfect-transfer profile.
std::vector<double> mirror_couplings(int n_sites);

// argmax_t of the end-to-end single-excitation transfer probability,
// located on a coarse grid and refined by golden-section search on the
// full-space oracle amplitude.
double perfect_transfer_time(const ChainSpec& spec, double t_hi = 3.0);

}  // namespace spinmem::testing
