#pragma once

#include <cstdint>
#include <vector>

#include "bogolab/common.hpp"
#include "bogolab/fock_basis.hpp"

namespace bogolab {

// Mode rotation on an N-particle amplitude vector. `psi` lives on the
// fixed-total basis over d modes; the output replaces every creation operator
// of source mode mu by sum_nu M(nu,mu) b+_nu, for unitary M.
//
// Each source state is rebuilt from the vacuum one quantum at a time. Because
// the columns of M are orthonormal, dividing by sqrt(c) after the c-th
// creation into the same source mode keeps every intermediate exactly unit
// norm, so nothing overflows no matter how large N gets.
inline Vec apply_mode_rotation(const FockBasis& basis, const Vec& psi, const Mat& M) {
  const int d = basis.modes();
  const int N = basis.total();
  if (basis.kind() != FockBasis::Kind::FixedTotal)
    fail(ErrorCode::InvalidArgument, "mode rotation expects a fixed-total basis");
  if (M.rows() != d || M.cols() != d) fail(ErrorCode::DimensionMismatch, "rotation matrix size mismatch");
  if (psi.size() != static_cast<Eigen::Index>(basis.size()))
    fail(ErrorCode::DimensionMismatch, "state size mismatch");

  const FockBasis work_basis = FockBasis::truncated(d, N);
  Vec out = Vec::Zero(psi.size());
  Vec work(static_cast<Eigen::Index>(work_basis.size()));
  Vec next(static_cast<Eigen::Index>(work_basis.size()));
  std::vector<int> occ(d);

  basis.for_each([&](std::uint64_t src, const std::vector<int>& s) {
    const Cx amp = psi[static_cast<Eigen::Index>(src)];
    if (amp == Cx(0, 0)) return;
    work.setZero();
    work[0] = 1.0;  // vacuum
    int filled = 0;
    for (int mu = 0; mu < d; ++mu) {
      for (int c = 1; c <= s[static_cast<std::size_t>(mu)]; ++c) {
        // next <- (sum_nu M(nu,mu) b+_nu) work / sqrt(c), sector `filled` -> +1
        next.setZero();
        const std::uint64_t off = work_basis.sector_offset(filled);
        const std::uint64_t cnt = work_basis.sector_size(filled);
        occ = work_basis.unrank(off);
        for (std::uint64_t r = 0; r < cnt; ++r) {
          const Cx a = work[static_cast<Eigen::Index>(off + r)];
          if (a != Cx(0, 0)) {
            for (int nu = 0; nu < d; ++nu) {
              if (M(nu, mu) == Cx(0, 0)) continue;
              ++occ[static_cast<std::size_t>(nu)];
              const double f = std::sqrt(static_cast<double>(occ[static_cast<std::size_t>(nu)]));
              next[static_cast<Eigen::Index>(work_basis.rank(occ))] += a * M(nu, mu) * f;
              --occ[static_cast<std::size_t>(nu)];
            }
          }
          if (r + 1 < cnt) FockBasis::next_in_sector(occ);
        }
        next /= std::sqrt(static_cast<double>(c));
        std::swap(work, next);
        ++filled;
      }
    }
    out += amp * work.segment(static_cast<Eigen::Index>(work_basis.sector_offset(N)),
                              static_cast<Eigen::Index>(work_basis.sector_size(N)));
  });
  return out;
}

// Fixed-total state over d modes -> truncated state over the d-1 excited
// modes: occupation (n0, rest) lands in sector N - n0 with amplitude intact.
inline Vec strip_condensate_mode(const FockBasis& fixed, const Vec& psi) {
  const int d = fixed.modes();
  const int N = fixed.total();
  const FockBasis trunc = FockBasis::truncated(d - 1, N);
  Vec out = Vec::Zero(static_cast<Eigen::Index>(trunc.size()));
  std::vector<int> rest(d - 1);
  fixed.for_each([&](std::uint64_t r, const std::vector<int>& occ) {
    for (int i = 1; i < d; ++i) rest[static_cast<std::size_t>(i - 1)] = occ[static_cast<std::size_t>(i)];
    out[static_cast<Eigen::Index>(trunc.rank(rest))] = psi[static_cast<Eigen::Index>(r)];
  });
  return out;
}

// Inverse re-indexing: pad each truncated state (sector j over d-1 modes)
// with N-j condensate quanta. Sectors above N are rejected.
inline Vec pad_condensate_mode(const FockBasis& trunc, const Vec& phi, int N) {
  const int d = trunc.modes() + 1;
  if (trunc.total() > N) fail(ErrorCode::InvalidArgument, "excitation cutoff exceeds particle count");
  const FockBasis fixed = FockBasis::fixed_total(d, N);
  Vec out = Vec::Zero(static_cast<Eigen::Index>(fixed.size()));
  std::vector<int> occ(d);
  trunc.for_each([&](std::uint64_t r, const std::vector<int>& rest) {
    const Cx a = phi[static_cast<Eigen::Index>(r)];
    if (a == Cx(0, 0)) return;
    int j = 0;
    for (int v : rest) j += v;
    occ[0] = N - j;
    for (int i = 1; i < d; ++i) occ[static_cast<std::size_t>(i)] = rest[static_cast<std::size_t>(i - 1)];
    out[static_cast<Eigen::Index>(fixed.rank(occ))] = a;
  });
  return out;
}

// Full excitation map: rotate the N-body state into the frame G = [c|v_1..],
// then split off the condensate mode. Forward direction takes amplitudes over
// the physical modes to amplitudes over excited-mode occupations.
inline Vec excitation_map_forward(const Mat& G, const Vec& psi, int N) {
  const int d = static_cast<int>(G.rows());
  const FockBasis fixed = FockBasis::fixed_total(d, N);
  return strip_condensate_mode(fixed, apply_mode_rotation(fixed, psi, G.adjoint()));
}

// Recover the cutoff of a truncated state from its length (sizes are strictly
// increasing in the cutoff, so the match is unique).
inline int truncated_cutoff_for_size(int modes, Eigen::Index n) {
  for (int M = 0;; ++M) {
    const FockBasis b = FockBasis::truncated(modes, M);
    if (static_cast<Eigen::Index>(b.size()) == n) return M;
    if (static_cast<Eigen::Index>(b.size()) > n)
      fail(ErrorCode::DimensionMismatch, "state length matches no excitation cutoff");
  }
}

inline Vec excitation_map_inverse(const Mat& G, const Vec& phi, int N) {
  const int d = static_cast<int>(G.rows());
  const FockBasis trunc = FockBasis::truncated(d - 1, truncated_cutoff_for_size(d - 1, phi.size()));
  const Vec padded = pad_condensate_mode(trunc, phi, N);
  const FockBasis fixed = FockBasis::fixed_total(d, N);
  return apply_mode_rotation(fixed, padded, G);
}

// <phi, N_+ phi> on a truncated basis: plain sector sum.
inline double nplus_expectation(const FockBasis& trunc, const Vec& phi) {
  double acc = 0;
  for (std::uint64_t r = 0; r < trunc.size(); ++r)
    acc += trunc.sector_of(r) * std::norm(phi[static_cast<Eigen::Index>(r)]);
  return acc;
}

// Re-cut a truncated state to a different cutoff over the same modes. Graded
// ordering makes shared sectors rank-identical, so this is a head copy.
inline Vec recut_truncated(const Vec& phi, int modes, int new_cutoff) {
  const FockBasis to = FockBasis::truncated(modes, new_cutoff);
  Vec out = Vec::Zero(static_cast<Eigen::Index>(to.size()));
  const Eigen::Index n = std::min<Eigen::Index>(phi.size(), out.size());
  out.head(n) = phi.head(n);
  return out;
}

}  // namespace bogolab
