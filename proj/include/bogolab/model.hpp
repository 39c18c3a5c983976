#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "bogolab/common.hpp"
#include "bogolab/tensor4.hpp"

namespace bogolab {

// Finite-mode mean-field model: kinetic matrix T over d modes and two-body
// tensor W with W[mnpq] = <u_m (x) u_n, w u_p (x) u_q>. The N-body operator is
//   H_N = sum T[mn] a+_m a_n + 1/(2(N-1)) sum W[mnpq] a+_m a+_n a_p a_q.
// T is kept in the input convention; `shift` records the uniform diagonal
// offset that brings its lowest eigenvalue to >= 1 where an operator bound
// needs a kinetic weight bounded below (t_shifted()). All reported energies
// stay in the input convention.
struct ModeProblem {
  int d = 0;
  Mat T;
  Tensor4 W;
  std::optional<Tensor4> W2;  // tensor of the squared interaction, for bound checks
  double shift = 0.0;
  std::string name = "model";

  Mat t_shifted() const { return T + shift * Mat::Identity(d, d); }
};

namespace detail {
inline double hermiticity_violation(const Mat& M) {
  return (M - M.adjoint()).cwiseAbs().maxCoeff();
}
}  // namespace detail

// Checks d >= 2, Hermiticity of T, the two W symmetries (and of W2 when
// present), then records the diagonal shift making min eig(T + shift) >= 1.
inline ModeProblem validate_problem(const Mat& T, const Tensor4& W,
                                    std::optional<Tensor4> W2 = std::nullopt,
                                    const std::string& name = "model") {
  const int d = static_cast<int>(T.rows());
  if (d < 2 || T.cols() != d) fail(ErrorCode::InvalidArgument, "kinetic matrix must be square with d >= 2");
  if (W.dim() != d) fail(ErrorCode::InvalidArgument, "interaction tensor dimension mismatch");
  if (!T.allFinite()) fail(ErrorCode::NonFinite, "kinetic matrix has a non-finite entry");
  if (!W.all_finite()) fail(ErrorCode::NonFinite, "interaction tensor has a non-finite entry");
  if (W2 && !W2->all_finite()) fail(ErrorCode::NonFinite, "W2 tensor has a non-finite entry");
  const double t_scale = std::max(1.0, T.cwiseAbs().maxCoeff());
  if (detail::hermiticity_violation(T) > 1e-12 * t_scale)
    fail(ErrorCode::NonHermitianKinetic, "kinetic matrix is not Hermitian");
  const double w_scale = std::max(1.0, W.max_abs());
  if (W.pair_exchange_violation() > 1e-12 * w_scale)
    fail(ErrorCode::SymmetryViolation, "interaction tensor violates pair exchange W[mnpq]=W[nmqp]");
  if (W.hermiticity_violation() > 1e-12 * w_scale)
    fail(ErrorCode::SymmetryViolation, "interaction tensor violates conj(W[mnpq])=W[pqmn]");
  if (W2) {
    if (W2->dim() != d) fail(ErrorCode::InvalidArgument, "W2 tensor dimension mismatch");
    const double w2_scale = std::max(1.0, W2->max_abs());
    if (W2->pair_exchange_violation() > 1e-12 * w2_scale || W2->hermiticity_violation() > 1e-12 * w2_scale)
      fail(ErrorCode::SymmetryViolation, "W2 tensor violates two-body symmetries");
  }

  ModeProblem p;
  p.d = d;
  p.T = (T + T.adjoint()) / 2.0;  // remove sub-tolerance asymmetry
  p.W = W;
  p.W2 = std::move(W2);
  p.name = name;
  Eigen::SelfAdjointEigenSolver<Mat> es(p.T);
  const double lam_min = es.eigenvalues().minCoeff();
  p.shift = std::max(0.0, 1.0 - lam_min);
  return p;
}

// Two-site hopping model with on-site interaction:
//   T = [[0,-t],[-t,0]],  W[mmmm] = U,  W2[mmmm] = U^2.
inline ModeProblem build_dimer(double t, double U) {
  Mat T(2, 2);
  T << 0.0, -t, -t, 0.0;
  Tensor4 W(2), W2(2);
  for (int m = 0; m < 2; ++m) {
    W.at(m, m, m, m) = U;
    W2.at(m, m, m, m) = U * U;
  }
  return validate_problem(T, W, W2, "dimer(t=" + fmt17(t) + ",U=" + fmt17(U) + ")");
}

// Translation-invariant ring of L sites in the momentum basis. vhat must be a
// real, even (vhat[k] == vhat[L-k]) list of Fourier coefficients of the
// two-body potential; then
//   T[kk]    = -2 t cos(2 pi k / L),
//   W[mnpq]  = vhat[(m-p) mod L] / L when m+n == p+q (mod L), else 0,
// and W2 uses the Fourier coefficients of the squared real-space potential.
inline ModeProblem build_ring(int L, double t, const std::vector<double>& vhat) {
  if (L < 2) fail(ErrorCode::InvalidArgument, "ring needs L >= 2");
  if (static_cast<int>(vhat.size()) != L) fail(ErrorCode::InvalidArgument, "vhat must have length L");
  for (int k = 0; k < L; ++k)
    if (std::abs(vhat[k] - vhat[(L - k) % L]) > 1e-12)
      fail(ErrorCode::ProfileNotEven,
           "vhat must be even: vhat[" + std::to_string(k) + "] != vhat[" + std::to_string((L - k) % L) + "]");

  // Real-space potential and its square, back to Fourier coefficients.
  std::vector<double> v(L, 0.0), vhat2(L, 0.0);
  for (int r = 0; r < L; ++r) {
    double acc = 0.0;
    for (int k = 0; k < L; ++k) acc += vhat[k] * std::cos(2.0 * M_PI * k * r / L);
    v[r] = acc / L;
  }
  for (int k = 0; k < L; ++k) {
    double acc = 0.0;
    for (int r = 0; r < L; ++r) acc += v[r] * v[r] * std::cos(2.0 * M_PI * k * r / L);
    vhat2[k] = acc;
  }

  Mat T = Mat::Zero(L, L);
  for (int k = 0; k < L; ++k) T(k, k) = -2.0 * t * std::cos(2.0 * M_PI * k / L);
  Tensor4 W(L), W2(L);
  for (int m = 0; m < L; ++m)
    for (int n = 0; n < L; ++n)
      for (int p = 0; p < L; ++p)
        for (int q = 0; q < L; ++q) {
          if ((m + n) % L != (p + q) % L) continue;
          const int transfer = ((m - p) % L + L) % L;
          W.at(m, n, p, q) = vhat[transfer] / L;
          W2.at(m, n, p, q) = vhat2[transfer] / L;
        }
  return validate_problem(T, W, W2, "ring(L=" + std::to_string(L) + ",t=" + fmt17(t) + ")");
}

// Random Hermitian instance. T is shifted to min eig 1 at construction; W is a
// random Hermitian pair-space matrix symmetrized under leg exchange and scaled
// by `strength`; W2 is its exact operator square, so the square bound check
// applies verbatim.
inline ModeProblem build_random(std::uint64_t seed, int d, double strength) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "d >= 2 required");
  Rng rng(seed);
  Mat T0(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) T0(i, j) = rng.complex_gaussian();
  Mat T = (T0 + T0.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(T);
  T += (1.0 - es.eigenvalues().minCoeff()) * Mat::Identity(d, d);

  const int dd = d * d;
  Mat P0(dd, dd);
  for (int i = 0; i < dd; ++i)
    for (int j = 0; j < dd; ++j) P0(i, j) = rng.complex_gaussian();
  Mat P = (P0 + P0.adjoint()) / 2.0;
  // Symmetrize under simultaneous exchange of both legs: (m,n)->(n,m), (p,q)->(q,p).
  Mat Pex(dd, dd);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) Pex(m * d + n, p * d + q) = P(n * d + m, q * d + p);
  P = strength * (P + Pex) / 2.0;

  Tensor4 W = Tensor4::from_pair_matrix(P, d);
  Tensor4 W2 = Tensor4::from_pair_matrix(P * P, d);
  return validate_problem(T, W, W2,
                          "random(seed=" + std::to_string(seed) + ",d=" + std::to_string(d) +
                              ",strength=" + fmt17(strength) + ")");
}

// Smallest constant C0 with w^2 <= C0 (1 (x) T_s + T_s (x) 1) on the two-body
// space, T_s the shifted kinetic matrix (so the right side is >= 2): the top
// eigenvalue of the generalized Hermitian problem W2 x = lambda K x.
inline double check_assumption_c0(const ModeProblem& p) {
  if (!p.W2) fail(ErrorCode::MissingW2, "W2 tensor required for the square bound check");
  const int d = p.d;
  const Mat Ts = p.t_shifted();
  {
    Eigen::SelfAdjointEigenSolver<Mat> es(Ts);
    if (es.eigenvalues().minCoeff() <= 0)
      fail(ErrorCode::NonPositiveKinetic, "shifted kinetic matrix is not positive definite");
  }
  Mat K = Mat::Zero(d * d, d * d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int pp = 0; pp < d; ++pp)
        for (int q = 0; q < d; ++q) {
          Cx val(0, 0);
          if (m == pp) val += Ts(n, q);
          if (n == q) val += Ts(m, pp);
          K(m * d + n, pp * d + q) = val;
        }
  const Mat M2 = p.W2->pair_matrix();
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(M2, K);
  if (ges.info() != Eigen::Success)
    fail(ErrorCode::NoConvergence, "generalized eigensolve for the square bound failed");
  return ges.eigenvalues().maxCoeff();
}

}  // namespace bogolab
