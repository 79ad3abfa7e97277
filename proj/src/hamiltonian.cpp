#include "spinmem/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include "spinmem/errors.hpp"
#include "spinmem/io.hpp"

namespace spinmem {

std::string model_name(Model m) { return m == Model::Heisenberg ? "heisenberg" : "xy"; }

Model model_from_name(const std::string& name) {
  if (name == "heisenberg") return Model::Heisenberg;
  if (name == "xy") return Model::XY;
  throw std::invalid_argument("unknown model '" + name + "' (expected heisenberg|xy)");
}

void ChainSpec::validate() const {
  layout.validate();
  const std::size_t n = static_cast<std::size_t>(layout.total());
  if (couplings.size() != n - 1)
    throw std::invalid_argument("chain: expected " + std::to_string(n - 1) + " couplings, got " +
                                std::to_string(couplings.size()));
  if (fields.size() != n)
    throw std::invalid_argument("chain: expected " + std::to_string(n) + " fields, got " +
                                std::to_string(fields.size()));
  for (double j : couplings)
    if (!std::isfinite(j)) throw std::invalid_argument("chain: non-finite coupling");
  for (double b : fields)
    if (!std::isfinite(b)) throw std::invalid_argument("chain: non-finite field");
}

bool ChainSpec::connected() const {
  for (double j : couplings)
    if (j == 0.0) return false;
  return true;
}

namespace {

inline double z_proj(std::uint32_t pattern, int site) {
  return ((pattern >> site) & 1u) ? 0.5 : -0.5;
}

}  // namespace

SectorHamiltonian build_chain(const ChainSpec& spec, int n) {
  spec.validate();
  const int sites = spec.layout.total();
  if (n < 0 || n > sites)
    throw std::invalid_argument("build_chain: excitation count out of range");
  if (binomial(sites, n) > static_cast<std::int64_t>(kMaxSectorDim))
    throw ResourceError("build_chain: sector " + std::to_string(n) + " of " +
                        std::to_string(sites) + " sites has dimension " +
                        std::to_string(binomial(sites, n)) +
                        " beyond the dense cap; use survival-bound mode instead");
  if (!spec.connected())
    warn("chain has a zero coupling (disconnected); transfer cannot complete");

  SectorBasis basis(sites, n);
  const std::size_t dim = basis.dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);

  for (std::size_t k = 0; k < dim; ++k) {
    const std::uint32_t s = basis.state(k);
    double diag = 0.0;
    for (int i = 0; i < sites; ++i) diag += spec.fields[i] * z_proj(s, i);
    if (spec.model == Model::Heisenberg)
      for (int i = 0; i + 1 < sites; ++i)
        diag += spec.couplings[i] * z_proj(s, i) * z_proj(s, i + 1);
    h(k, k) = diag;

    // exchange: move one excitation across bond i
    for (int i = 0; i + 1 < sites; ++i) {
      const std::uint32_t bits = (1u << i) | (1u << (i + 1));
      const std::uint32_t occ = s & bits;
      if (occ == 0 || occ == bits) continue;
      const std::uint32_t t = s ^ bits;
      const std::size_t l = basis.index_of(t);
      h(l, k) = spec.couplings[i];
    }
  }
  return {std::move(basis), std::move(h)};
}

ChainSpec random_chain(const SiteLayout& layout, Model model, double lo, double hi,
                       std::uint64_t seed) {
  layout.validate();
  if (!(lo > 0.0)) throw std::invalid_argument("random_chain: lower bound must be positive");
  if (!(hi >= lo)) throw std::invalid_argument("random_chain: empty coupling range");

  ChainSpec spec;
  spec.layout = layout;
  spec.model = model;
  spec.rng_seed = seed;
  spec.fields.assign(layout.total(), 0.0);
  std::mt19937_64 rng(seed);
  spec.couplings.resize(layout.total() - 1);
  for (double& j : spec.couplings) {
    // uniform in [lo, hi] from the top 53 bits; bit-stable across platforms
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    j = lo + (hi - lo) * u;
  }
  return spec;
}

Spectrum diagonalize(const SectorHamiltonian& h) {
  const std::size_t dim = h.basis.dim();
  if (static_cast<std::size_t>(h.matrix.rows()) != dim ||
      static_cast<std::size_t>(h.matrix.cols()) != dim)
    throw std::invalid_argument("diagonalize: matrix does not match the basis dimension");

  const double asym = (h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw std::invalid_argument("diagonalize: input is not Hermitian (asymmetry " +
                                format_double(asym) + ")");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.matrix);
  if (solver.info() != Eigen::Success)
    throw NumericalError("diagonalize: eigensolver failed to converge");

  Spectrum sp{h.basis, solver.eigenvalues(), solver.eigenvectors()};
  const Eigen::MatrixXcd rebuilt =
      sp.eigenvectors * sp.eigenvalues.asDiagonal() * sp.eigenvectors.adjoint();
  const double scale = std::max(1.0, h.matrix.cwiseAbs().maxCoeff());
  const double residual = (rebuilt - h.matrix).cwiseAbs().maxCoeff();
  if (residual > 1e-10 * scale)
    throw NumericalError("diagonalize: reconstruction residual " + format_double(residual));
  return sp;
}

}  // namespace spinmem
