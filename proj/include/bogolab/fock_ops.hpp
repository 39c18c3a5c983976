#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bogolab/bogoliubov.hpp"
#include "bogolab/common.hpp"
#include "bogolab/fock_basis.hpp"
#include "bogolab/model.hpp"
#include "bogolab/sparse.hpp"

namespace bogolab {

// ---- operator assembly ------------------------------------------------
//
// All builders generate row r by enumerating the operator strings that can
// connect basis state r to a column state, with exact integer bookkeeping
// under a single square root per entry.

// sum X[mn] a+_m a_n (particle-number conserving).
inline SparseOperator build_one_body(const FockBasis& basis, const Mat& X, Cx coupling = 1.0) {
  const int k = basis.modes();
  if (X.rows() != k || X.cols() != k) fail(ErrorCode::DimensionMismatch, "one-body matrix size mismatch");
  SparseOperator op(basis.size());
  std::vector<std::pair<std::uint64_t, Cx>> row;
  std::vector<int> work(k);
  basis.for_each([&](std::uint64_t, const std::vector<int>& occ) {
    row.clear();
    Cx diag(0, 0);
    for (int m = 0; m < k; ++m)
      if (occ[m] > 0) diag += X(m, m) * static_cast<double>(occ[m]);
    if (diag != Cx(0, 0)) row.push_back({basis.rank(occ), coupling * diag});
    for (int m = 0; m < k; ++m) {
      if (occ[m] == 0) continue;
      for (int n = 0; n < k; ++n) {
        if (n == m || X(m, n) == Cx(0, 0)) continue;
        work = occ;
        const std::uint64_t f = static_cast<std::uint64_t>(work[m]) * (work[n] + 1);
        --work[m];
        ++work[n];
        row.push_back({basis.rank(work), coupling * X(m, n) * std::sqrt(static_cast<double>(f))});
      }
    }
    op.append_row(row);
  });
  op.finish();
  return op;
}

// coupling * sum W[mnpq] a+_m a+_n a_p a_q.
inline SparseOperator build_interaction(const FockBasis& basis, const Tensor4& W, double coupling) {
  const int k = basis.modes();
  if (W.dim() != k) fail(ErrorCode::DimensionMismatch, "interaction tensor size mismatch");
  SparseOperator op(basis.size());
  std::vector<std::pair<std::uint64_t, Cx>> row;
  std::vector<int> work(k);
  basis.for_each([&](std::uint64_t, const std::vector<int>& occ) {
    row.clear();
    for (int m = 0; m < k; ++m) {
      if (occ[m] == 0) continue;
      for (int n = 0; n < k; ++n) {
        if (occ[n] - (n == m ? 1 : 0) <= 0) continue;
        for (int p = 0; p < k; ++p)
          for (int q = 0; q < k; ++q) {
            const Cx w = W.at(m, n, p, q);
            if (w == Cx(0, 0)) continue;
            work = occ;
            std::uint64_t f = static_cast<std::uint64_t>(work[m]);
            --work[m];
            f *= static_cast<std::uint64_t>(work[n]);
            --work[n];
            ++work[p];
            f *= static_cast<std::uint64_t>(work[p]);
            ++work[q];
            f *= static_cast<std::uint64_t>(work[q]);
            row.push_back({basis.rank(work), coupling * w * std::sqrt(static_cast<double>(f))});
          }
      }
    }
    op.append_row(row);
  });
  op.finish();
  return op;
}

// H_N on the fixed-N sector over the problem's d modes, input energy
// convention: sum T a+a + 1/(2(N-1)) sum W a+a+aa.
inline SparseOperator build_hn_from(const Mat& T, const Tensor4& W, const FockBasis& basis, int N) {
  if (N < 2) fail(ErrorCode::InvalidArgument, "N >= 2 required");
  const SparseOperator kin = build_one_body(basis, T);
  const SparseOperator pot = build_interaction(basis, W, 0.5 / (N - 1));
  return add(kin, pot);
}

inline SparseOperator build_hn(const ModeProblem& p, int N) {
  const FockBasis basis = FockBasis::fixed_total(p.d, N);
  return build_hn_from(p.T, p.W, basis, N);
}

// Diagonal operator g(sector): sector = total occupation of the state.
inline SparseOperator build_sector_diagonal(const FockBasis& basis,
                                            const std::function<double(int)>& g) {
  SparseOperator op(basis.size());
  std::vector<std::pair<std::uint64_t, Cx>> row;
  basis.for_each([&](std::uint64_t r, const std::vector<int>& occ) {
    row.clear();
    int total = 0;
    for (int v : occ) total += v;
    row.push_back({r, Cx(g(total), 0)});
    op.append_row(row);
  });
  op.finish();
  return op;
}

inline SparseOperator build_number(const FockBasis& basis) {
  return build_sector_diagonal(basis, [](int n) { return static_cast<double>(n); });
}

// a+(g) = sum g_i b+_i (raises the sector by one; rows outside the cutoff
// cannot be reached so nothing is dropped).
inline SparseOperator build_create(const FockBasis& basis, const Vec& g) {
  const int k = basis.modes();
  if (g.size() != k) fail(ErrorCode::DimensionMismatch, "creation vector size mismatch");
  SparseOperator op(basis.size());
  std::vector<std::pair<std::uint64_t, Cx>> row;
  std::vector<int> work(k);
  basis.for_each([&](std::uint64_t, const std::vector<int>& occ) {
    row.clear();
    for (int i = 0; i < k; ++i) {
      if (occ[i] == 0 || g[i] == Cx(0, 0)) continue;
      work = occ;
      const double f = static_cast<double>(work[i]);
      --work[i];
      row.push_back({basis.rank(work), g[i] * std::sqrt(f)});
    }
    op.append_row(row);
  });
  op.finish();
  return op;
}

// (1/2) sum (B[ij] b+_i b+_j + conj(B[ij]) b_i b_j); pair creation beyond the
// cutoff is dropped, which is exactly the two-sided compression of the form.
inline SparseOperator build_pair_form(const FockBasis& basis, const Mat& B) {
  const int k = basis.modes();
  if (B.rows() != k || B.cols() != k) fail(ErrorCode::DimensionMismatch, "pair matrix size mismatch");
  if (basis.kind() != FockBasis::Kind::Truncated)
    fail(ErrorCode::InvalidArgument, "pair terms need the truncated basis");
  const int M = basis.total();
  SparseOperator op(basis.size());
  std::vector<std::pair<std::uint64_t, Cx>> row;
  std::vector<int> work(k);
  basis.for_each([&](std::uint64_t, const std::vector<int>& occ) {
    row.clear();
    int total = 0;
    for (int v : occ) total += v;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        if (B(i, j) == Cx(0, 0)) continue;
        // creation half: column two sectors below the row
        if (occ[i] >= 1 && occ[j] - (i == j ? 1 : 0) >= 1) {
          work = occ;
          std::uint64_t f = static_cast<std::uint64_t>(work[i]);
          --work[i];
          f *= static_cast<std::uint64_t>(work[j]);
          --work[j];
          row.push_back({basis.rank(work), 0.5 * B(i, j) * std::sqrt(static_cast<double>(f))});
        }
        // annihilation half: column two sectors above, inside the cutoff
        if (total + 2 <= M) {
          work = occ;
          ++work[j];
          std::uint64_t f = static_cast<std::uint64_t>(work[j]);
          ++work[i];
          f *= static_cast<std::uint64_t>(work[i]);
          row.push_back({basis.rank(work), 0.5 * std::conj(B(i, j)) * std::sqrt(static_cast<double>(f))});
        }
      }
    op.append_row(row);
  });
  op.finish();
  return op;
}

// Two-sided compression 1^{<=M} bH 1^{<=M} of the quadratic form onto the
// truncated excitation basis. M = 0 gives the 1x1 zero operator.
inline SparseOperator fock_representation(const QuadraticForm& qf, int M) {
  const int modes = static_cast<int>(qf.A.rows());
  const FockBasis basis = FockBasis::truncated(modes, M);
  const SparseOperator one = build_one_body(basis, qf.A);
  const SparseOperator pair = build_pair_form(basis, qf.B);
  return add(one, pair);
}

// Column scaling by a sector function: op * g(N_+), the scalar acting before
// the operator. Values scaled in place on the sparsity pattern.
inline SparseOperator scale_columns_by_sector(const SparseOperator& op, const FockBasis& basis,
                                              const std::function<double(int)>& g) {
  std::vector<double> f(basis.size());
  for (std::uint64_t c = 0; c < basis.size(); ++c) f[c] = g(basis.sector_of(c));
  SparseOperator out(op.dim());
  for (std::uint64_t r = 0; r < op.dim(); ++r) {
    auto row = op.row(r);
    for (auto& e : row) e.second *= f[e.first];
    out.append_row(row);
  }
  out.finish();
  return out;
}

// ---- eigensolvers -------------------------------------------------------

struct EigOpts {
  std::uint64_t seed = 12345;
  bool force_iterative = false;  // exercise the Lanczos path below the dense cutoff
  double tol = 1e-10;            // Ritz residual threshold, relative to the operator scale
  int max_outer = 16;
};

struct EigResult {
  RVec values;  // ascending
  Mat vectors;  // matching columns, orthonormal
};

inline constexpr std::uint64_t kDenseCutoff = 400;

inline EigResult eig_dense_all(const SparseOperator& op) {
  Eigen::SelfAdjointEigenSolver<Mat> es(op.dense());
  if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "dense eigensolve failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace detail {

// One Lanczos sweep with full reorthogonalization against both the Krylov
// block and the deflation block. Returns converged Ritz pairs in ascending
// order, accepting only the converged prefix so no lower eigenvalue can be
// skipped across restarts.
inline void lanczos_sweep(const SparseOperator& op, Rng& rng, const Mat& deflate, int want,
                          double tol_abs, std::vector<double>& out_vals, std::vector<Vec>& out_vecs) {
  const std::uint64_t dim = op.dim();
  const int m_max = static_cast<int>(
      std::min<std::uint64_t>(dim - static_cast<std::uint64_t>(deflate.cols()), std::max(120, 4 * want + 60)));
  if (m_max <= 0) return;

  std::vector<Vec> basis;
  basis.reserve(m_max);
  Vec v = rng.unit_vector(static_cast<int>(dim));
  auto orthogonalize = [&](Vec& x) {
    for (int pass = 0; pass < 2; ++pass) {
      if (deflate.cols() > 0) x -= deflate * (deflate.adjoint() * x);
      for (const Vec& b : basis) x -= b * Cx(b.dot(x));
    }
  };
  orthogonalize(v);
  if (v.norm() < 1e-12) return;
  v /= v.norm();

  std::vector<double> alpha, beta;
  Vec w;
  for (int j = 0; j < m_max; ++j) {
    basis.push_back(v);
    op.matvec(v, w);
    alpha.push_back(std::real(Cx(v.dot(w))));
    orthogonalize(w);
    const double b = w.norm();
    if (b < 1e-13 * std::max(1.0, op.norm_inf())) break;  // Krylov space exhausted
    beta.push_back(b);
    v = w / b;
  }

  const int m = static_cast<int>(basis.size());
  if (m == 0) return;
  Mat Tm = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    Tm(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) {
      Tm(i, i + 1) = beta[static_cast<std::size_t>(i)];
      Tm(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(Tm);
  const bool exhausted = static_cast<std::size_t>(m) < beta.size() + 1 || m == static_cast<int>(dim - deflate.cols());
  for (int i = 0; i < m && static_cast<int>(out_vals.size()) < want; ++i) {
    const double resid = (i < m - 1 || exhausted)
                             ? (static_cast<std::size_t>(m) <= beta.size()
                                    ? beta[static_cast<std::size_t>(m - 1)] * std::abs(es.eigenvectors()(m - 1, i))
                                    : 0.0)
                             : tol_abs * 2;  // last pair of an unexhausted sweep: unknown, reject
    if (resid > tol_abs) break;  // prefix discipline
    Vec y = Vec::Zero(static_cast<Eigen::Index>(dim));
    for (int r = 0; r < m; ++r) y += basis[static_cast<std::size_t>(r)] * es.eigenvectors()(r, i);
    y /= y.norm();
    out_vals.push_back(es.eigenvalues()[i]);
    out_vecs.push_back(y);
  }
}

}  // namespace detail

// k lowest eigenpairs. Dense below kDenseCutoff unless force_iterative;
// otherwise Lanczos with full reorthogonalization, restarted with deflation
// until k pairs have converged (this is what resolves degenerate clusters).
inline EigResult eig_lowest(const SparseOperator& op, int k, const EigOpts& opts = {}) {
  const std::uint64_t dim = op.dim();
  if (k < 1 || static_cast<std::uint64_t>(k) > dim)
    fail(ErrorCode::InvalidArgument, "requested eigenpair count out of range");
  if (dim <= kDenseCutoff && !opts.force_iterative) {
    EigResult all = eig_dense_all(op);
    EigResult out;
    out.values = all.values.head(k);
    out.vectors = all.vectors.leftCols(k);
    return out;
  }

  Rng rng(opts.seed);
  const double tol_abs = opts.tol * std::max(1.0, op.norm_inf());
  std::vector<double> vals;
  std::vector<Vec> vecs;
  for (int outer = 0; outer < opts.max_outer && static_cast<int>(vals.size()) < k; ++outer) {
    Mat deflate(dim, vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) deflate.col(static_cast<Eigen::Index>(i)) = vecs[i];
    const std::size_t before = vals.size();
    detail::lanczos_sweep(op, rng, deflate, k - static_cast<int>(vals.size()), tol_abs, vals, vecs);
    if (vals.size() == before && outer > 2)
      fail(ErrorCode::ConvergenceFailure,
           "Lanczos stalled with " + std::to_string(vals.size()) + " of " + std::to_string(k) +
               " eigenpairs converged");
  }
  if (static_cast<int>(vals.size()) < k)
    fail(ErrorCode::ConvergenceFailure,
         "Lanczos reached the restart cap with " + std::to_string(vals.size()) + " of " +
             std::to_string(k) + " eigenpairs converged");

  std::vector<int> order(vals.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
  EigResult out;
  out.values = RVec(k);
  out.vectors = Mat(static_cast<Eigen::Index>(dim), k);
  for (int i = 0; i < k; ++i) {
    out.values[i] = vals[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    out.vectors.col(i) = vecs[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }
  return out;
}

inline double expectation(const SparseOperator& op, const Vec& psi) {
  return std::real(Cx(psi.dot(op.apply(psi))));
}

// Reduced one-body density gamma[mn] = <psi, a+_n a_m psi> / N on a fixed-N basis.
inline Mat one_body_density(const FockBasis& basis, const Vec& psi, int N) {
  const int k = basis.modes();
  Mat gamma = Mat::Zero(k, k);
  std::vector<int> work(k);
  basis.for_each([&](std::uint64_t r, const std::vector<int>& occ) {
    const Cx amp = psi[static_cast<Eigen::Index>(r)];
    if (amp == Cx(0, 0)) return;
    for (int m = 0; m < k; ++m) {
      if (occ[m] == 0) continue;
      gamma(m, m) += std::conj(amp) * amp * static_cast<double>(occ[m]);
      for (int n = 0; n < k; ++n) {
        if (n == m) continue;
        work = occ;
        std::uint64_t f = static_cast<std::uint64_t>(work[m]);
        --work[m];
        ++work[n];
        f *= static_cast<std::uint64_t>(work[n]);
        // row m annihilates, column n creates: gamma[mn] = <a+_n a_m>
        gamma(m, n) += std::conj(psi[static_cast<Eigen::Index>(basis.rank(work))]) * amp *
                       std::sqrt(static_cast<double>(f));
      }
    }
  });
  gamma /= static_cast<double>(N);
  return (gamma + gamma.adjoint()) / 2.0;
}

}  // namespace bogolab
