#pragma once

#include <queue>
#include <string>
#include <vector>

#include "bogolab/common.hpp"
#include "bogolab/frame.hpp"
#include "bogolab/hartree.hpp"
#include "bogolab/model.hpp"

namespace bogolab {

// Quadratic excitation Hamiltonian at a stationary state, expressed over the
// complement modes v_1..v_{d-1} of the condensate frame:
//   bH = sum A[ij] b+_i b_j + (1/2) sum (B[ij] b+_i b+_j + conj(B[ij]) b_i b_j).
struct QuadraticForm {
  Mat A;       // Hermitian, (d-1) x (d-1)
  Mat B;       // symmetric, (d-1) x (d-1)
  Mat qbasis;  // rows are the complement modes v_i in the input mode basis
  Mat G;       // full frame [c | v_1 .. v_{d-1}]
  Vec c;
  double mu = 0.0;
};

inline QuadraticForm quadratic_form(const ModeProblem& p, const HartreeState& st) {
  if (st.residual > 1e-6)
    fail(ErrorCode::NotStationary, "state residual " + fmt17(st.residual) + " exceeds 1e-6");
  const ExcitedBlocks blocks = excited_blocks(p, st.c, st.mu);
  QuadraticForm qf;
  qf.A = blocks.A;
  qf.B = blocks.B;
  qf.G = blocks.G;
  qf.qbasis = blocks.G.rightCols(p.d - 1).transpose();
  qf.c = st.c;
  qf.mu = st.mu;
  return qf;
}

// Result of the symplectic diagonalization. Conventions:
//   b_i = sum_k U[ik] g_k + conj(V[ik]) g+_k,
//   bH  = sum_k e_k g+_k g_k + E0,  E0 = (sum e_k - tr A) / 2,
//   depletion = tr(V+ V) = expected excited-particle number in the g-vacuum.
// stability: "stable" (all e_k > 0), "landau" (real e_k of mixed sign),
// "dynamically_unstable" (complex frequencies), "degenerate" (zero modes;
// counted in zero_modes and excluded from e).
struct BogoliubovSpectrum {
  RVec e;
  double E0 = std::numeric_limits<double>::quiet_NaN();
  std::string stability;
  double eta = 0.0;  // min eig of [[A,B],[conj B, conj A]]
  double depletion = std::numeric_limits<double>::quiet_NaN();
  Mat U, V;
  int zero_modes = 0;
};

namespace detail {

inline Mat block_matrix(const Mat& A, const Mat& B) {
  const int n = static_cast<int>(A.rows());
  Mat S(2 * n, 2 * n);
  S.topLeftCorner(n, n) = A;
  S.topRightCorner(n, n) = B;
  S.bottomLeftCorner(n, n) = B.conjugate();
  S.bottomRightCorner(n, n) = A.conjugate();
  return S;
}

inline Mat metric_j(int n) {
  Mat J = Mat::Zero(2 * n, 2 * n);
  J.topLeftCorner(n, n) = Mat::Identity(n, n);
  J.bottomRightCorner(n, n) = -Mat::Identity(n, n);
  return J;
}

}  // namespace detail

// Diagonalizes the quadratic form. The positive-definite branch runs the
// Cholesky route: S = K+ K, then the Hermitian eigenproblem of K J K+ whose
// spectrum is {+-e_k}; the first n columns of T = K^{-1} Y (J Lambda)^{1/2}
// are eigenvectors of J S, so the conjugate partners complete a symplectic
// transform exactly. Otherwise the dynamical matrix J S is solved directly
// and modes are classified by their symplectic norm.
inline BogoliubovSpectrum diagonalize(const QuadraticForm& qf, double tol = 1e-10) {
  const int n = static_cast<int>(qf.A.rows());
  BogoliubovSpectrum out;
  const Mat S = detail::block_matrix(qf.A, qf.B);
  const Mat J = detail::metric_j(n);
  {
    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    out.eta = es.eigenvalues().minCoeff();
  }
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());

  if (out.eta > tol) {
    Eigen::LLT<Mat> llt(S);
    if (llt.info() != Eigen::Success)
      fail(ErrorCode::NoConvergence, "Cholesky of a positive-definite quadratic form failed");
    const Mat K = Mat(llt.matrixL()).adjoint();  // S = K+ K
    Eigen::SelfAdjointEigenSolver<Mat> es(K * J * K.adjoint());
    // Eigenvalues ascending: first n negative, last n positive (pairwise +-e).
    RVec e(n);
    Mat Y(2 * n, n);
    for (int k = 0; k < n; ++k) {
      e[k] = es.eigenvalues()[n + k];
      Y.col(k) = es.eigenvectors().col(n + k);
    }
    Mat T1 = K.triangularView<Eigen::Upper>().solve(Y);
    for (int k = 0; k < n; ++k) T1.col(k) *= std::sqrt(e[k]);
    out.e = e;
    out.U = T1.topRows(n);
    out.V = T1.bottomRows(n);
    out.stability = "stable";
    out.E0 = 0.5 * (e.sum() - std::real(qf.A.trace()));
    out.depletion = (out.V.adjoint() * out.V).trace().real();
    return out;
  }

  // Indefinite or marginal form: eigenmodes of the dynamical matrix J S.
  Eigen::ComplexEigenSolver<Mat> ces(J * S);
  if (ces.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "dynamical matrix eigensolve failed");
  const double imag_tol = 1e-10 * scale;
  double max_imag = 0.0;
  for (int k = 0; k < 2 * n; ++k) max_imag = std::max(max_imag, std::abs(ces.eigenvalues()[k].imag()));
  if (max_imag > imag_tol) {
    out.stability = "dynamically_unstable";
    out.e = RVec(0);
    return out;
  }

  const double zero_tol = std::max(tol, 1e-12 * scale);
  struct Mode {
    double e;
    Vec x;
  };
  std::vector<Mode> keep;
  int zero_count = 0;
  for (int k = 0; k < 2 * n; ++k) {
    const double lam = ces.eigenvalues()[k].real();
    Vec x = ces.eigenvectors().col(k);
    if (std::abs(lam) <= zero_tol) {
      ++zero_count;
      continue;
    }
    const double jnorm = std::real(Cx(x.dot(J * x)));
    if (jnorm > zero_tol) keep.push_back({lam, x / std::sqrt(jnorm)});
  }
  std::sort(keep.begin(), keep.end(), [](const Mode& a, const Mode& b) {
    if (std::abs(a.e) != std::abs(b.e)) return std::abs(a.e) < std::abs(b.e);
    return a.e < b.e;
  });

  out.zero_modes = zero_count / 2;
  const bool marginal = std::abs(out.eta) <= tol || out.zero_modes > 0;
  out.stability = marginal ? "degenerate" : "landau";
  out.e = RVec(static_cast<int>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.e[static_cast<int>(k)] = keep[k].e;
  if (!marginal && static_cast<int>(keep.size()) == n) {
    out.U = Mat(n, n);
    out.V = Mat(n, n);
    for (int k = 0; k < n; ++k) {
      out.U.col(k) = keep[k].x.head(n);
      out.V.col(k) = keep[k].x.tail(n);
    }
    out.E0 = 0.5 * (out.e.sum() - std::real(qf.A.trace()));
    out.depletion = (out.V.adjoint() * out.V).trace().real();
  }
  return out;
}

// Ground-state expectation of the excited-particle number N_+ in the
// Bogoliubov vacuum. Defined for the stable branch only.
inline double depletion(const BogoliubovSpectrum& spec) {
  if (spec.stability != "stable")
    fail(ErrorCode::NotStable, "depletion is defined for stable spectra (got " + spec.stability + ")");
  return spec.depletion;
}

// First l_max values of {E0 + sum n_k e_k} in increasing order, requiring all
// e_k > 0. Best-first heap enumeration; each popped configuration spawns
// children by incrementing mode indices at or beyond its last incremented
// index, so every occupation pattern is generated exactly once. Exact value
// ties are ordered by lexicographic occupation pattern.
struct BogLevel {
  double value;
  std::vector<int> occupation;
};

inline std::vector<BogLevel> enumerate_levels(const BogoliubovSpectrum& spec, int l_max) {
  if (spec.stability != "stable")
    fail(ErrorCode::NotStable,
         "level enumeration requires a stable spectrum (got " + spec.stability + ")");
  const int n = static_cast<int>(spec.e.size());
  if (l_max < 1) fail(ErrorCode::InvalidArgument, "l_max >= 1 required");

  struct Node {
    double value;
    std::vector<int> occ;
    int last;  // children increment indices >= last
  };
  auto cmp = [](const Node& a, const Node& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.occ > b.occ;  // min-heap: lexicographically smaller pattern first
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
  heap.push({spec.E0, std::vector<int>(n, 0), 0});

  std::vector<BogLevel> out;
  while (!heap.empty() && static_cast<int>(out.size()) < l_max) {
    Node cur = heap.top();
    heap.pop();
    out.push_back({cur.value, cur.occ});
    for (int k = cur.last; k < n; ++k) {
      Node child{cur.value + spec.e[k], cur.occ, k};
      child.occ[k] += 1;
      heap.push(std::move(child));
    }
  }
  return out;
}

}  // namespace bogolab
