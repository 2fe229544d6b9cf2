#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mflab {

using Occupation = std::uint16_t;

// Which part of the symmetric Fock space a basis spans: one particle-number
// sector, or every sector up to a cutoff.
struct Sector {
  enum class Kind { fixed, truncated };
  Kind kind = Kind::fixed;
  int n = 0;  // particle number for fixed, n_max for truncated

  static Sector fixed(int n) { return {Kind::fixed, n}; }
  static Sector truncated(int n_max) { return {Kind::truncated, n_max}; }

  bool operator==(const Sector&) const = default;
  std::string to_string() const;
};

inline constexpr std::size_t kDefaultCapacity = 5'000'000;

// Number of occupation tuples of `modes` modes with total exactly n, i.e.
// C(n+modes-1, modes-1). Saturates at SIZE_MAX.
std::size_t sector_dimension(int modes, int n);
std::size_t basis_dimension(int modes, Sector sector);

// Occupation-number basis over `modes` bosonic modes.
//
// States are graded by total occupation (lowest sector first) and ordered
// descending-lexicographically inside a sector: for two modes and n = 2 the
// order is (2,0), (1,1), (0,2). Index lookup is an O(modes) combinatorial
// ranking, no hash table.
class FockBasis {
 public:
  using Ptr = std::shared_ptr<const FockBasis>;

  static Ptr make(int modes, Sector sector, std::size_t capacity = kDefaultCapacity);

  int modes() const { return modes_; }
  const Sector& sector() const { return sector_; }
  std::size_t size() const { return size_; }
  bool is_fixed() const { return sector_.kind == Sector::Kind::fixed; }
  bool is_truncated() const { return sector_.kind == Sector::Kind::truncated; }

  int min_total() const { return is_fixed() ? sector_.n : 0; }
  int max_total() const { return sector_.n; }
  bool has_sector(int k) const { return k >= min_total() && k <= max_total(); }

  // Contiguous index range [offset, offset + size) of sector k.
  std::size_t sector_offset(int k) const;
  std::size_t sector_size(int k) const;

  std::span<const Occupation> occupation(std::size_t i) const {
    return {occ_.data() + i * static_cast<std::size_t>(modes_), static_cast<std::size_t>(modes_)};
  }
  int total(std::size_t i) const { return totals_[i]; }

  std::optional<std::size_t> find(std::span<const Occupation> occ) const;
  std::optional<std::size_t> find(std::span<const int> occ) const;
  std::size_t index(std::span<const Occupation> occ) const;
  std::size_t index(std::initializer_list<int> occ) const;

  bool operator==(const FockBasis& o) const { return modes_ == o.modes_ && sector_ == o.sector_; }

 private:
  FockBasis(int modes, Sector sector);
  std::size_t rank_in_sector(std::span<const int> occ, int total) const;
  std::uint64_t binom(int a, int b) const;

  int modes_;
  Sector sector_;
  std::size_t size_ = 0;
  std::vector<Occupation> occ_;
  std::vector<std::int32_t> totals_;
  std::vector<std::size_t> offsets_;  // offsets_[k - min_total()]
  int binom_rows_ = 0;
  std::vector<std::uint64_t> binom_;  // Pascal triangle, row-major (binom_rows_ x modes_+1)
};

using BasisPtr = FockBasis::Ptr;

// Process-wide cache of bases keyed by (modes, sector), so operations that
// hop between sectors do not re-enumerate. Thread-safe.
BasisPtr shared_basis(int modes, Sector sector, std::size_t capacity = kDefaultCapacity);

}  // namespace mflab
