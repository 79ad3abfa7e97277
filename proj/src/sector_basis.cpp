#include "spinmem/sector_basis.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace spinmem {

void SiteLayout::validate() const {
  if (n_a < 1) throw std::invalid_argument("layout: n_a must be >= 1");
  if (n_b < 1) throw std::invalid_argument("layout: n_b must be >= 1");
  if (n_c < 0) throw std::invalid_argument("layout: n_c must be >= 0");
  if (total() > kMaxSites)
    throw std::invalid_argument("layout: " + std::to_string(total()) +
                                " sites exceeds the cap of " + std::to_string(kMaxSites));
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

SectorBasis::SectorBasis(int site_count, int excitations)
    : site_count_(site_count), excitations_(excitations) {
  if (site_count < 0 || site_count > kMaxSites)
    throw std::invalid_argument("sector basis: site count must be in [0, " +
                                std::to_string(kMaxSites) + "]");
  if (excitations < 0 || excitations > site_count)
    throw std::invalid_argument("sector basis: excitation count out of range");

  states_.reserve(static_cast<std::size_t>(binomial(site_count, excitations)));
  if (excitations == 0) {
    states_.push_back(0);
    return;
  }
  // Gosper's hack walks same-weight patterns in increasing order.
  const std::uint32_t limit = (site_count == 32) ? 0 : (1u << site_count);
  std::uint32_t s = (1u << excitations) - 1u;
  while (s < limit) {
    states_.push_back(s);
    std::uint32_t u = s & (~s + 1u);
    std::uint32_t v = s + u;
    if (v == 0) break;
    s = v | (((s ^ v) / u) >> 2);
  }
}

std::size_t SectorBasis::index_of(std::uint32_t pattern) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), pattern);
  if (it == states_.end() || *it != pattern)
    throw std::invalid_argument("sector basis: pattern not in this sector");
  return static_cast<std::size_t>(it - states_.begin());
}

SectorBasis enumerate_sector(int site_count, int n) { return SectorBasis(site_count, n); }

RegionSplit split_by_region(const SectorBasis& basis, std::uint32_t region_mask) {
  const std::uint32_t all = (basis.site_count() == 32)
                                ? ~0u
                                : ((1u << basis.site_count()) - 1u);
  if ((region_mask & ~all) != 0)
    throw std::invalid_argument("split_by_region: region outside the site range");
  RegionSplit split;
  split.region_mask = region_mask;
  for (std::size_t k = 0; k < basis.dim(); ++k)
    split.groups[basis.state(k) & region_mask].push_back(k);
  return split;
}

RegionSplit split_by_region(const SectorBasis& basis, const std::vector<int>& region_sites) {
  std::uint32_t mask = 0;
  for (int site : region_sites) {
    if (site < 0 || site >= basis.site_count())
      throw std::invalid_argument("split_by_region: site index out of bounds");
    mask |= 1u << site;
  }
  return split_by_region(basis, mask);
}

}  // namespace spinmem
