#pragma once

#include "bogolab/common.hpp"
#include "bogolab/model.hpp"

namespace bogolab {

// All condensate-relative quantities are expressed in one frame: the unitary
// G = [c | v_1 ... v_{d-1}] whose first column is the (gauge-fixed) condensate
// and whose remaining columns span its orthogonal complement. G comes from a
// single Householder reflection, so every module that needs the complement
// basis sees the same one.
inline Mat householder_frame(const Vec& c) {
  const int d = static_cast<int>(c.size());
  Mat G = Mat::Zero(d, d);
  // Reflection H with H c = beta e0, |beta| = 1; beta chosen to avoid
  // cancellation. Columns 1..d-1 of H^+ are then an orthonormal basis of the
  // complement of c.
  Cx beta;
  if (std::abs(c[0]) == 0.0)
    beta = Cx(-1.0, 0.0);
  else
    beta = -c[0] / std::abs(c[0]);
  Vec w = c;
  w[0] -= beta;
  const double wn2 = w.squaredNorm();
  Mat H = Mat::Identity(d, d);
  if (wn2 > 1e-28) H -= (2.0 / wn2) * (w * w.adjoint());
  G.col(0) = c;
  Mat Hadj = H.adjoint();
  for (int j = 1; j < d; ++j) G.col(j) = Hadj.col(j);
  return G;
}

// (|u0|^2 * w) as a d x d matrix: mf[mn] = sum conj(c_q) c_p W[mqnp].
inline Mat meanfield_matrix(const Tensor4& W, const Vec& c) {
  const int d = W.dim();
  Mat mf = Mat::Zero(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      Cx acc(0, 0);
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) acc += std::conj(c[q]) * c[p] * W.at(m, q, n, p);
      mf(m, n) = acc;
    }
  return (mf + mf.adjoint()) / 2.0;
}

// Exchange kernel k1(x,y) = u0(x) w(x-y) conj(u0(y)): k1[mn] = sum c_p conj(c_q) W[mqpn].
inline Mat k1_matrix(const Tensor4& W, const Vec& c) {
  const int d = W.dim();
  Mat k1 = Mat::Zero(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      Cx acc(0, 0);
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) acc += c[p] * std::conj(c[q]) * W.at(m, q, p, n);
      k1(m, n) = acc;
    }
  return (k1 + k1.adjoint()) / 2.0;
}

// Pair kernel K2(x,y) = u0(x) w(x-y) u0(y): K2[mn] = sum c_p c_q W[mnpq]. Symmetric.
inline Mat pair_matrix(const Tensor4& W, const Vec& c) {
  const int d = W.dim();
  Mat K2 = Mat::Zero(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      Cx acc(0, 0);
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) acc += c[p] * c[q] * W.at(m, n, p, q);
      K2(m, n) = acc;
    }
  return (K2 + K2.transpose()) / 2.0;
}

// sum conj(c_m) conj(c_n) W[mnpq] c_p c_q; real for a symmetric tensor.
inline double quartic_energy(const Tensor4& W, const Vec& c) {
  const int d = W.dim();
  Cx acc(0, 0);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q)
          acc += std::conj(c[m]) * std::conj(c[n]) * W.at(m, n, p, q) * c[p] * c[q];
  return acc.real();
}

// Hessian / Bogoliubov blocks on the complement of c:
//   A[ij] = <v_i, (T + mf - mu + k1) v_j>   (Hermitian)
//   B[ij] = <v_i (x) v_j, K2>               (symmetric)
// with v_i the complement columns of the Householder frame.
struct ExcitedBlocks {
  Mat A;
  Mat B;
  Mat G;  // full frame, column 0 = c
};

inline ExcitedBlocks excited_blocks(const ModeProblem& p, const Vec& c, double mu) {
  const int d = p.d;
  const Mat G = householder_frame(c);
  const Mat V = G.rightCols(d - 1);
  const Mat mf = meanfield_matrix(p.W, c);
  const Mat k1 = k1_matrix(p.W, c);
  const Mat K2 = pair_matrix(p.W, c);
  const Mat h = p.T + mf - mu * Mat::Identity(d, d);
  ExcitedBlocks blocks;
  blocks.A = V.adjoint() * (h + k1) * V;
  blocks.A = (blocks.A + blocks.A.adjoint()) / 2.0;
  blocks.B = V.adjoint() * K2 * V.conjugate();
  blocks.B = (blocks.B + blocks.B.transpose()) / 2.0;
  blocks.G = G;
  return blocks;
}

// Minimal eigenvalue of the full second-variation block matrix
// [[A, B], [conj(B), conj(A)]]; > 0 characterizes a non-degenerate minimizer.
inline double hessian_min_eig(const Mat& A, const Mat& B) {
  const int n = static_cast<int>(A.rows());
  Mat S(2 * n, 2 * n);
  S.topLeftCorner(n, n) = A;
  S.topRightCorner(n, n) = B;
  S.bottomLeftCorner(n, n) = B.conjugate();
  S.bottomRightCorner(n, n) = A.conjugate();
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  return es.eigenvalues().minCoeff();
}

}  // namespace bogolab
