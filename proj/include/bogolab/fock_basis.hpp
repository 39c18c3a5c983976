#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "bogolab/common.hpp"

namespace bogolab {

// Occupation-number basis over `modes` bosonic modes, either the fixed-total
// sector (sum n_i == total) or the truncated space (sum n_i <= total). States
// are ordered graded-colexicographically: by total occupation, then within a
// sector by colex (the last differing entry decides, smaller first), so the
// first state of a sector is (n, 0, ..., 0). Rank/unrank go through the
// combinatorial number system; no state table is stored.
class FockBasis {
 public:
  enum class Kind { FixedTotal, Truncated };

  static FockBasis fixed_total(int modes, int total) { return FockBasis(Kind::FixedTotal, modes, total); }
  static FockBasis truncated(int modes, int total) { return FockBasis(Kind::Truncated, modes, total); }

  Kind kind() const { return kind_; }
  int modes() const { return modes_; }
  int total() const { return total_; }
  std::uint64_t size() const { return size_; }

  // Number of compositions of n into k nonnegative parts: C(n+k-1, k-1).
  std::uint64_t sector_size(int n) const { return binom_(n + modes_ - 1, modes_ - 1); }

  // First rank of the given sector (truncated basis only; 0 for fixed-total).
  std::uint64_t sector_offset(int n) const {
    return kind_ == Kind::FixedTotal ? 0 : offsets_[static_cast<std::size_t>(n)];
  }

  std::uint64_t rank(const std::vector<int>& occ) const {
    std::uint64_t r = 0;
    int remaining = std::accumulate(occ.begin(), occ.end(), 0);
    if (kind_ == Kind::Truncated) r = offsets_[static_cast<std::size_t>(remaining)];
    for (int j = modes_ - 1; j >= 1; --j) {
      // states whose entry at j is smaller than occ[j], via the hockey stick
      r += binom_(remaining + j, j) - binom_(remaining - occ[j] + j, j);
      remaining -= occ[j];
    }
    return r;
  }

  std::vector<int> unrank(std::uint64_t r) const {
    std::vector<int> occ(modes_, 0);
    int n = total_;
    if (kind_ == Kind::Truncated) {
      n = 0;
      while (n < total_ && offsets_[static_cast<std::size_t>(n + 1)] <= r) ++n;
      r -= offsets_[static_cast<std::size_t>(n)];
    }
    for (int j = modes_ - 1; j >= 1; --j) {
      int v = 0;
      for (;;) {
        const std::uint64_t cnt = binom_(n - v + j - 1, j - 1);
        if (r < cnt) break;
        if (v >= n) fail(ErrorCode::InvalidArgument, "rank out of range");
        r -= cnt;
        ++v;
      }
      occ[j] = v;
      n -= v;
    }
    occ[0] = n;
    return occ;
  }

  int sector_of(std::uint64_t r) const {
    if (kind_ == Kind::FixedTotal) return total_;
    int n = 0;
    while (n < total_ && offsets_[static_cast<std::size_t>(n + 1)] <= r) ++n;
    return n;
  }

  // In-place colex successor within a fixed-total sector; false at the end.
  static bool next_in_sector(std::vector<int>& occ) {
    const int k = static_cast<int>(occ.size());
    int prefix = 0;
    for (int j = 1; j < k; ++j) {
      prefix += occ[j - 1];
      if (prefix > 0) {
        occ[j] += 1;
        occ[0] = prefix - 1;
        for (int i = 1; i < j; ++i) occ[i] = 0;
        return true;
      }
    }
    return false;
  }

  // Visits all states in rank order; f(rank, occ).
  template <typename F>
  void for_each(F&& f) const {
    std::uint64_t r = 0;
    const int lo = kind_ == Kind::FixedTotal ? total_ : 0;
    for (int n = lo; n <= total_; ++n) {
      std::vector<int> occ(modes_, 0);
      occ[0] = n;
      do {
        f(r, occ);
        ++r;
      } while (next_in_sector(occ));
    }
  }

 private:
  FockBasis(Kind kind, int modes, int total) : kind_(kind), modes_(modes), total_(total) {
    if (modes < 1) fail(ErrorCode::InvalidArgument, "basis needs at least one mode");
    if (total < 0) fail(ErrorCode::InvalidArgument, "negative total occupation");
    binom_.build(total + modes + 1, modes);
    if (kind_ == Kind::Truncated) {
      offsets_.resize(static_cast<std::size_t>(total) + 2, 0);
      for (int n = 0; n <= total; ++n) {
        const std::uint64_t s = sector_size(n);
        offsets_[static_cast<std::size_t>(n) + 1] = checked_add(offsets_[static_cast<std::size_t>(n)], s);
      }
      size_ = offsets_.back();
    } else {
      size_ = sector_size(total);
    }
    if (size_ > kMaxStates)
      fail(ErrorCode::SizeOverflow, "basis would hold " + std::to_string(size_) + " states (cap " +
                                        std::to_string(kMaxStates) + ")");
  }

  static constexpr std::uint64_t kMaxStates = 5'000'000;

  static std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = 0;
    if (__builtin_add_overflow(a, b, &s)) fail(ErrorCode::SizeOverflow, "basis size overflows 64 bits");
    return s;
  }

  // Pascal rectangle C(n, k) for k <= k_max only. Entries saturate on 64-bit
  // overflow; every count a valid basis queries is bounded by the state cap,
  // so saturated entries are only reached when size() itself overflows and
  // the constructor rejects the basis.
  struct Binomials {
    static constexpr std::uint64_t kSaturated = ~std::uint64_t{0};
    std::vector<std::vector<std::uint64_t>> rows;

    void build(int n_max, int k_max) {
      rows.assign(static_cast<std::size_t>(n_max) + 1, {});
      for (int n = 0; n <= n_max; ++n) {
        const int cols = std::min(n, k_max);
        rows[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(cols) + 1, 1);
        for (int k = 1; k <= cols; ++k) {
          const std::uint64_t a = get(n - 1, k - 1);
          const std::uint64_t b = get(n - 1, k);
          std::uint64_t s = 0;
          rows[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
              (a == kSaturated || b == kSaturated || __builtin_add_overflow(a, b, &s)) ? kSaturated : s;
        }
      }
    }

    std::uint64_t get(int n, int k) const {
      if (k < 0 || n < 0 || k > n) return 0;
      const auto& row = rows[static_cast<std::size_t>(n)];
      if (static_cast<std::size_t>(k) >= row.size()) return kSaturated;  // never queried validly
      return row[static_cast<std::size_t>(k)];
    }

    std::uint64_t operator()(int n, int k) const {
      if (k < 0 || n < 0 || k > n) return 0;
      if (k > n - k && n - k < static_cast<int>(rows[static_cast<std::size_t>(n)].size()))
        return get(n, n - k);
      return get(n, k);
    }
  };

  Kind kind_;
  int modes_;
  int total_;
  std::uint64_t size_ = 0;
  std::vector<std::uint64_t> offsets_;
  Binomials binom_;
};

}  // namespace bogolab
