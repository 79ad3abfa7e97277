#include "spinmem/propagator.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace spinmem {

SectorUnitary evolve(const Spectrum& spectrum, double tau) {
  if (!std::isfinite(tau)) throw std::invalid_argument("evolve: non-finite duration");
  const std::size_t dim = spectrum.basis.dim();
  Eigen::VectorXcd phases(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double a = -spectrum.eigenvalues[k] * tau;
    phases[k] = std::complex<double>(std::cos(a), std::sin(a));
  }
  Eigen::MatrixXcd u =
      spectrum.eigenvectors * phases.asDiagonal() * spectrum.eigenvectors.adjoint();
  return {spectrum.basis, std::move(u), tau};
}

SectorContraction build_T(const SectorUnitary& u, const SiteLayout& layout) {
  layout.validate();
  if (layout.total() != u.basis.site_count())
    throw std::invalid_argument("build_T: layout does not match the basis site count");

  const std::uint32_t b_mask = layout.b_mask();
  std::vector<std::size_t> sub;
  for (std::size_t k = 0; k < u.basis.dim(); ++k)
    if ((u.basis.state(k) & b_mask) == 0) sub.push_back(k);

  const std::size_t d = sub.size();
  Eigen::MatrixXcd t(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) t(r, c) = u.matrix(sub[r], sub[c]);
  return {u.basis, std::move(sub), std::move(t), u.tau};
}

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()[0];
}

Eigen::MatrixXcd contraction_power(const SectorContraction& t, int j) {
  if (j < 0) throw std::invalid_argument("contraction_power: negative exponent");
  if (j > kMaxPowerSteps)
    throw std::invalid_argument("contraction_power: exponent exceeds the cap of " +
                                std::to_string(kMaxPowerSteps));
  const Eigen::Index d = t.matrix.rows();
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(d, d);
  for (int i = 0; i < j; ++i) p = t.matrix * p;
  return p;
}

Eigen::VectorXcd apply(const SectorUnitary& u, const Eigen::VectorXcd& v) {
  if (v.size() != u.matrix.cols())
    throw std::invalid_argument("apply: vector does not match the unitary dimension");
  return u.matrix * v;
}

Eigen::VectorXcd apply(const SectorContraction& t, const Eigen::VectorXcd& v) {
  const Eigen::Index sub_dim = t.matrix.rows();
  if (v.size() == sub_dim) return t.matrix * v;
  if (static_cast<std::size_t>(v.size()) == t.basis.dim()) {
    Eigen::VectorXcd proj(sub_dim);
    for (Eigen::Index k = 0; k < sub_dim; ++k) proj[k] = v[t.sub_index[k]];
    const Eigen::VectorXcd out = t.matrix * proj;
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(v.size());
    for (Eigen::Index k = 0; k < sub_dim; ++k) full[t.sub_index[k]] = out[k];
    return full;
  }
  throw std::invalid_argument("apply: vector matches neither the sub-block nor the sector");
}

}  // namespace spinmem
