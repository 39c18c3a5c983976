#pragma once

#include <vector>

#include "bogolab/bogoliubov.hpp"
#include "bogolab/excitation.hpp"
#include "bogolab/fock_ops.hpp"

namespace bogolab {

// Re-index an operator assembled on the fixed-N basis over the d frame modes
// into the truncated basis over the d-1 excited modes: occupation (n0, rest)
// maps to `rest` in sector N - n0. This is a relabeling, values untouched.
inline SparseOperator reindex_to_excitations(const SparseOperator& op, int d, int N) {
  const FockBasis fixed = FockBasis::fixed_total(d, N);
  const FockBasis trunc = FockBasis::truncated(d - 1, N);
  std::vector<std::uint64_t> to_trunc(fixed.size());
  std::vector<std::uint64_t> to_fixed(trunc.size());
  std::vector<int> rest(d - 1);
  fixed.for_each([&](std::uint64_t r, const std::vector<int>& occ) {
    for (int i = 1; i < d; ++i) rest[static_cast<std::size_t>(i - 1)] = occ[static_cast<std::size_t>(i)];
    const std::uint64_t t = trunc.rank(rest);
    to_trunc[r] = t;
    to_fixed[t] = r;
  });
  SparseOperator out(trunc.size());
  for (std::uint64_t t = 0; t < trunc.size(); ++t) {
    auto row = op.row(to_fixed[t]);
    for (auto& e : row) e.first = to_trunc[e.first];
    out.append_row(row);
  }
  out.finish();
  return out;
}

namespace detail {

// sum over m,n >= 1 of B[mn] b+_m b+_n (no 1/2, creation only), indices in
// excited-mode labeling.
inline SparseOperator build_pair_create(const FockBasis& basis, const Mat& B) {
  const int k = basis.modes();
  SparseOperator op(basis.size());
  std::vector<std::pair<std::uint64_t, Cx>> row;
  std::vector<int> work(k);
  basis.for_each([&](std::uint64_t, const std::vector<int>& occ) {
    row.clear();
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (B(i, j) == Cx(0, 0)) continue;
        if (occ[static_cast<std::size_t>(i)] < 1 || occ[static_cast<std::size_t>(j)] - (i == j ? 1 : 0) < 1)
          continue;
        work = occ;
        std::uint64_t f = static_cast<std::uint64_t>(work[static_cast<std::size_t>(i)]);
        --work[static_cast<std::size_t>(i)];
        f *= static_cast<std::uint64_t>(work[static_cast<std::size_t>(j)]);
        --work[static_cast<std::size_t>(j)];
        row.push_back({basis.rank(work), B(i, j) * std::sqrt(static_cast<double>(f))});
      }
    op.append_row(row);
  });
  op.finish();
  return op;
}

// sum over m,n,p of C[mnp] b+_m b+_n b_p; C given as a callable. Rows are the
// targets: each column sits one sector below its row, so every connection
// stays inside the cutoff.
template <typename Coef>
inline SparseOperator build_cubic(const FockBasis& basis, Coef&& coef) {
  const int k = basis.modes();
  SparseOperator op(basis.size());
  std::vector<std::pair<std::uint64_t, Cx>> row;
  std::vector<int> work(k);
  basis.for_each([&](std::uint64_t, const std::vector<int>& occ) {
    row.clear();
    for (int m = 0; m < k; ++m)
      for (int n = 0; n < k; ++n) {
        if (occ[static_cast<std::size_t>(n)] - (m == n ? 1 : 0) < 1 || occ[static_cast<std::size_t>(m)] < 1)
          continue;
        for (int p = 0; p < k; ++p) {
          const Cx w = coef(m, n, p);
          if (w == Cx(0, 0)) continue;
          work = occ;
          std::uint64_t f = static_cast<std::uint64_t>(work[static_cast<std::size_t>(m)]);
          --work[static_cast<std::size_t>(m)];
          f *= static_cast<std::uint64_t>(work[static_cast<std::size_t>(n)]);
          --work[static_cast<std::size_t>(n)];
          ++work[static_cast<std::size_t>(p)];
          f *= static_cast<std::uint64_t>(work[static_cast<std::size_t>(p)]);
          row.push_back({basis.rank(work), w * std::sqrt(static_cast<double>(f))});
        }
      }
    op.append_row(row);
  });
  op.finish();
  return op;
}

inline SparseOperator half_sum_with_adjoint(const SparseOperator& op) {
  return add(op, op.adjoint(), 0.5, 0.5);
}

}  // namespace detail

struct ResidualBuild {
  SparseOperator M;                   // U H_N U+ - N e_H - compressed bH
  std::vector<SparseOperator> terms;  // termwise only: (R_j + R_j+)/2, j = 0..5
};

// The correction operator of the quadratic approximation, assembled exactly:
// rotate the interaction tensors into the condensate frame, build H_N there,
// relabel onto the excitation basis, and subtract the scalar and the
// compressed quadratic form. With `termwise` the six correction terms are
// assembled independently from their closed forms (the sqrt(N - N_+) factors
// as exact sector diagonals) and their half-sum is checked against M.
inline ResidualBuild residual_operator(const ModeProblem& p, const HartreeState& st, int N,
                                       bool termwise = false) {
  if (st.residual > 1e-6)
    fail(ErrorCode::NotStationary, "state residual " + fmt17(st.residual) + " exceeds 1e-6");
  const int d = p.d;
  const QuadraticForm qf = quadratic_form(p, st);
  const Mat G = qf.G;
  const Mat Trot = G.adjoint() * p.T * G;
  const Tensor4 Wrot = p.W.rotated(G);

  const FockBasis fixed = FockBasis::fixed_total(d, N);
  const FockBasis trunc = FockBasis::truncated(d - 1, N);
  const SparseOperator hn_frame = build_hn_from(Trot, Wrot, fixed, N);
  const SparseOperator hn_x = reindex_to_excitations(hn_frame, d, N);
  const SparseOperator bh = fock_representation(qf, N);
  const SparseOperator ident = build_sector_diagonal(trunc, [](int) { return 1.0; });

  ResidualBuild out{add(add(hn_x, ident, 1.0, -static_cast<double>(N) * st.energy), bh, 1.0, -1.0), {}};
  if (!termwise) return out;

  // Frame-coordinate blocks: with the condensate at e_0, the mean-field and
  // exchange kernels are slices of the rotated tensor.
  const int k = d - 1;
  Mat mf_k1 = Mat::Zero(k, k);  // (mf + k1) on the excited block
  Mat Bpair = Mat::Zero(k, k);  // pair kernel K2 on the excited block
  Vec g(k);                     // linear kernel mf[., 0]
  for (int m = 1; m < d; ++m) {
    g[m - 1] = Wrot.at(m, 0, 0, 0);
    for (int n = 1; n < d; ++n) {
      mf_k1(m - 1, n - 1) = Wrot.at(m, 0, n, 0) + Wrot.at(m, 0, 0, n);
      Bpair(m - 1, n - 1) = Wrot.at(m, n, 0, 0);
    }
  }
  Tensor4 Wex(k);
  for (int m = 1; m < d; ++m)
    for (int n = 1; n < d; ++n)
      for (int pp = 1; pp < d; ++pp)
        for (int q = 1; q < d; ++q) Wex.at(m - 1, n - 1, pp - 1, q - 1) = Wrot.at(m, n, pp, q);
  const double w0000 = std::real(Wrot.at(0, 0, 0, 0));
  const double Nm1 = static_cast<double>(N - 1);

  out.terms.push_back(build_sector_diagonal(
      trunc, [&](int j) { return 0.5 * w0000 * j * (j - 1.0) / Nm1; }));
  out.terms.push_back(scale_columns_by_sector(
      build_one_body(trunc, mf_k1), trunc, [&](int j) { return -(j - 1.0) / Nm1; }));
  out.terms.push_back(detail::half_sum_with_adjoint(scale_columns_by_sector(
      build_create(trunc, g), trunc,
      [&](int j) { return -2.0 * j * std::sqrt(static_cast<double>(N - j)) / Nm1; })));
  out.terms.push_back(detail::half_sum_with_adjoint(scale_columns_by_sector(
      detail::build_pair_create(trunc, Bpair), trunc, [&](int j) {
        if (j > N - 2) return 0.0;
        return std::sqrt(static_cast<double>(N - j) * (N - j - 1.0)) / Nm1 - 1.0;
      })));
  out.terms.push_back(build_interaction(trunc, Wex, 0.5 / Nm1));
  out.terms.push_back(detail::half_sum_with_adjoint(scale_columns_by_sector(
      detail::build_cubic(trunc,
                          [&](int m, int n, int pp) { return Wrot.at(m + 1, n + 1, pp + 1, 0); }),
      trunc, [&](int j) { return 2.0 * std::sqrt(static_cast<double>(N - j)) / Nm1; })));

  SparseOperator half_sum = out.terms[0];
  for (std::size_t i = 1; i < out.terms.size(); ++i) half_sum = add(half_sum, out.terms[i]);
  const SparseOperator defect = add(half_sum, out.M, 1.0, -1.0);
  const double mismatch = defect.norm_inf();
  if (mismatch > 1e-10)
    fail(ErrorCode::NotStationary,
         "termwise identity defect " + fmt17(mismatch) +
             " exceeds 1e-10; the state is not stationary enough for the exact decomposition "
             "(gradient residual " +
             fmt17(st.residual) + ")");
  return out;
}

// Weight operator of the residual bound: dGamma(Q T_s Q) N_+^2 + 1 on the
// truncated basis, T_s the shifted kinetic matrix (bounded below by 1, so the
// weight dominates the kinetic energy of every excited particle).
inline SparseOperator residual_weight(const ModeProblem& p, const HartreeState& st, int N) {
  const int d = p.d;
  const Mat G = householder_frame(st.c);
  const Mat Ts_rot = G.adjoint() * p.t_shifted() * G;
  const FockBasis trunc = FockBasis::truncated(d - 1, N);
  const Mat Ts_ex = Ts_rot.block(1, 1, d - 1, d - 1);
  const SparseOperator kin = scale_columns_by_sector(
      build_one_body(trunc, Ts_ex), trunc,
      [](int j) { return static_cast<double>(j) * static_cast<double>(j); });
  const SparseOperator ident = build_sector_diagonal(trunc, [](int) { return 1.0; });
  return add(kin, ident);
}

}  // namespace bogolab
