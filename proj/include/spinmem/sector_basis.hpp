#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace spinmem {

// Dense sector matrices past this many sites exceed desk scale.
inline constexpr int kMaxSites = 24;

// Chain partition: sites [0, n_a) belong to the sender, [n_a, n_a+n_c) to the
// connecting segment, [n_a+n_c, N) to the receiver block. Site 0 is the least
// significant bit of a basis pattern; a set bit is an excitation (spin up).
struct SiteLayout {
  int n_a = 1;
  int n_c = 0;
  int n_b = 1;

  int total() const { return n_a + n_c + n_b; }
  int b_first() const { return n_a + n_c; }
  std::uint32_t a_mask() const { return ((1u << n_a) - 1u); }
  std::uint32_t c_mask() const { return ((1u << n_c) - 1u) << n_a; }
  std::uint32_t b_mask() const { return ((1u << n_b) - 1u) << (n_a + n_c); }

  void validate() const;  // throws std::invalid_argument
  bool operator==(const SiteLayout&) const = default;
};

std::int64_t binomial(int n, int k);

// Ordered basis of the n-excitation subspace of `site_count` spins.
// Patterns are listed in strictly increasing integer order, so the ordinal of
// a pattern is recoverable by binary search.
class SectorBasis {
 public:
  SectorBasis(int site_count, int excitations);

  int site_count() const { return site_count_; }
  int excitations() const { return excitations_; }
  std::size_t dim() const { return states_.size(); }
  std::uint32_t state(std::size_t k) const { return states_[k]; }
  const std::vector<std::uint32_t>& states() const { return states_; }

  // Ordinal of a pattern; throws std::invalid_argument if it is not a
  // weight-n pattern of this basis.
  std::size_t index_of(std::uint32_t pattern) const;

 private:
  int site_count_;
  int excitations_;
  std::vector<std::uint32_t> states_;
};

SectorBasis enumerate_sector(int site_count, int n);

// Partition of a sector basis by the occupation pattern of a site subset.
// The group keyed by 0 is exactly the image of the "region empty" projector.
struct RegionSplit {
  std::uint32_t region_mask = 0;
  // region pattern -> ordinals in the parent basis, ascending
  std::map<std::uint32_t, std::vector<std::size_t>> groups;
};

RegionSplit split_by_region(const SectorBasis& basis, std::uint32_t region_mask);
RegionSplit split_by_region(const SectorBasis& basis, const std::vector<int>& region_sites);

}  // namespace spinmem
