#include "mflab/fock_basis.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "mflab/error.hpp"

namespace mflab {

std::string Sector::to_string() const {
  return (kind == Kind::fixed ? "fixed(" : "truncated(") + std::to_string(n) + ")";
}

std::size_t sector_dimension(int modes, int n) {
  if (modes < 1 || n < 0) return 0;
  // C(n + modes - 1, min(n, modes - 1)) with saturation
  const int k = std::min(n, modes - 1);
  const std::size_t top = static_cast<std::size_t>(n) + static_cast<std::size_t>(modes) - 1;
  long double acc = 1.0L;
  std::size_t exact = 1;
  bool saturated = false;
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<long double>(top - k + i) / i;
    if (acc > static_cast<long double>(std::numeric_limits<std::size_t>::max() / 2)) {
      saturated = true;
      break;
    }
    // exact integer update: C(top-k+i, i) = C(top-k+i-1, i-1) * (top-k+i) / i
    exact = exact * (top - k + i) / i;
  }
  return saturated ? std::numeric_limits<std::size_t>::max() : exact;
}

std::size_t basis_dimension(int modes, Sector sector) {
  if (sector.kind == Sector::Kind::fixed) return sector_dimension(modes, sector.n);
  std::size_t total = 0;
  for (int k = 0; k <= sector.n; ++k) {
    const std::size_t s = sector_dimension(modes, k);
    if (s > std::numeric_limits<std::size_t>::max() - total) return std::numeric_limits<std::size_t>::max();
    total += s;
  }
  return total;
}

FockBasis::Ptr FockBasis::make(int modes, Sector sector, std::size_t capacity) {
  if (modes < 1) throw ContractError("FockBasis: mode count must be >= 1");
  if (sector.n < 0) throw ContractError("FockBasis: negative particle number");
  if (sector.n > std::numeric_limits<Occupation>::max())
    throw ContractError("FockBasis: particle number exceeds occupation storage");
  const std::size_t dim = basis_dimension(modes, sector);
  if (dim > capacity) {
    throw CapacityError("FockBasis: " + sector.to_string() + " over " + std::to_string(modes) +
                        " modes has dimension " + std::to_string(dim) + " > capacity " +
                        std::to_string(capacity));
  }
  return Ptr(new FockBasis(modes, sector));
}

namespace {

// Emit every tuple of `modes` occupations summing to `n`, descending-lex.
void enumerate_sector(int modes, int n, std::vector<Occupation>& out) {
  std::vector<int> cur(modes, 0);
  cur[0] = n;
  while (true) {
    for (int p = 0; p < modes; ++p) out.push_back(static_cast<Occupation>(cur[p]));
    // successor: find rightmost p < modes-1 with cur[p] > 0, move one unit to
    // p+1 and gather everything to its right into p+1
    int p = modes - 2;
    while (p >= 0 && cur[p] == 0) --p;
    if (p < 0) break;
    int tail = 0;
    for (int q = p + 1; q < modes; ++q) {
      tail += cur[q];
      cur[q] = 0;
    }
    cur[p] -= 1;
    cur[p + 1] = tail + 1;
  }
}

}  // namespace

FockBasis::FockBasis(int modes, Sector sector) : modes_(modes), sector_(sector) {
  binom_rows_ = sector.n + modes + 1;
  binom_.assign(static_cast<std::size_t>(binom_rows_) * (modes + 1), 0);
  for (int a = 0; a < binom_rows_; ++a) {
    for (int b = 0; b <= std::min(a, modes); ++b) {
      std::uint64_t v = 1;
      if (b > 0 && b < a) v = binom(a - 1, b - 1) + binom(a - 1, b);
      binom_[static_cast<std::size_t>(a) * (modes + 1) + b] = v;
    }
  }
  const int lo = min_total();
  const int hi = max_total();
  size_ = basis_dimension(modes, sector);
  occ_.reserve(size_ * modes);
  totals_.reserve(size_);
  for (int k = lo; k <= hi; ++k) {
    offsets_.push_back(totals_.size());
    enumerate_sector(modes, k, occ_);
    totals_.resize(occ_.size() / modes, k);
  }
  offsets_.push_back(totals_.size());
}

std::uint64_t FockBasis::binom(int a, int b) const {
  if (b < 0 || a < 0 || b > a || b > modes_) return 0;
  return binom_[static_cast<std::size_t>(a) * (modes_ + 1) + b];
}

std::size_t FockBasis::sector_offset(int k) const {
  if (!has_sector(k)) throw ContractError("FockBasis: sector " + std::to_string(k) + " not in " + sector_.to_string());
  return offsets_[k - min_total()];
}

std::size_t FockBasis::sector_size(int k) const {
  if (!has_sector(k)) return 0;
  return offsets_[k - min_total() + 1] - offsets_[k - min_total()];
}

std::size_t FockBasis::rank_in_sector(std::span<const int> occ, int total) const {
  // Tuples sharing the prefix but with a larger entry at position p come
  // first; their count is a hockey-stick sum C(R - n_p - 1 + k, k) with k the
  // number of modes after p.
  std::size_t rank = 0;
  int remaining = total;
  for (int p = 0; p + 1 < modes_; ++p) {
    const int k = modes_ - p - 1;
    rank += binom(remaining - occ[p] - 1 + k, k);
    remaining -= occ[p];
  }
  return rank;
}

std::optional<std::size_t> FockBasis::find(std::span<const int> occ) const {
  if (static_cast<int>(occ.size()) != modes_) return std::nullopt;
  int total = 0;
  for (int v : occ) {
    if (v < 0) return std::nullopt;
    total += v;
  }
  if (!has_sector(total)) return std::nullopt;
  return offsets_[total - min_total()] + rank_in_sector(occ, total);
}

std::optional<std::size_t> FockBasis::find(std::span<const Occupation> occ) const {
  constexpr std::size_t kStack = 32;
  if (occ.size() <= kStack) {
    std::array<int, kStack> tmp{};
    std::copy(occ.begin(), occ.end(), tmp.begin());
    return find(std::span<const int>(tmp.data(), occ.size()));
  }
  std::vector<int> tmp(occ.begin(), occ.end());
  return find(std::span<const int>(tmp));
}

std::size_t FockBasis::index(std::span<const Occupation> occ) const {
  auto i = find(occ);
  if (!i) throw ContractError("FockBasis: occupation tuple not in basis");
  return *i;
}

std::size_t FockBasis::index(std::initializer_list<int> occ) const {
  auto i = find(std::span<const int>(occ.begin(), occ.size()));
  if (!i) throw ContractError("FockBasis: occupation tuple not in basis");
  return *i;
}

BasisPtr shared_basis(int modes, Sector sector, std::size_t capacity) {
  using Key = std::tuple<int, int, int>;
  static std::mutex mu;
  static std::map<Key, BasisPtr> cache;
  const Key key{modes, static_cast<int>(sector.kind), sector.n};
  if (modes >= 1 && basis_dimension(modes, sector) > capacity) return FockBasis::make(modes, sector, capacity);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto made = FockBasis::make(modes, sector, capacity);
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(made)).first->second;
}

}  // namespace mflab
