#pragma once

#include <string>
#include <vector>

#include "bogolab/common.hpp"
#include "bogolab/frame.hpp"
#include "bogolab/model.hpp"

namespace bogolab {

struct EnergyGradient {
  double energy;  // <c,Tc> + (1/2) sum conj(c)conj(c) W c c
  double mu;      // <c, (T + mf) c>
  Vec residual;   // (T + mf - mu) c, orthogonal to c by the choice of mu
};

inline EnergyGradient energy_and_gradient(const ModeProblem& p, const Vec& c_in) {
  if (c_in.size() != p.d) fail(ErrorCode::DimensionMismatch, "state dimension mismatch");
  const double nrm = c_in.norm();
  if (nrm < 1e-14) fail(ErrorCode::ZeroVector, "condensate vector has zero norm");
  const Vec c = c_in / nrm;
  EnergyGradient eg;
  const Mat mf = meanfield_matrix(p.W, c);
  const Vec Fc = p.T * c + mf * c;
  eg.mu = std::real(c.dot(Fc));
  eg.energy = std::real(c.dot(p.T * c)) + 0.5 * quartic_energy(p.W, c);
  eg.residual = Fc - eg.mu * c;
  return eg;
}

struct HartreeState {
  Vec c;                      // unit norm, gauge fixed
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;      // norm of (T + mf - mu) c
  std::string kind = "unknown";  // minimizer | saddle | degenerate | unknown
  double hessian_min_eig = 0.0;
};

// Classification threshold on the second-variation minimum.
inline constexpr double kHessianTol = 1e-10;

inline HartreeState make_state(const ModeProblem& p, const Vec& c_raw) {
  if (c_raw.norm() < 1e-14) fail(ErrorCode::ZeroVector, "condensate vector has zero norm");
  Vec c = gauge_fix(c_raw / c_raw.norm());
  const EnergyGradient eg = energy_and_gradient(p, c);
  HartreeState st;
  st.c = c;
  st.mu = eg.mu;
  st.energy = eg.energy;
  st.residual = eg.residual.norm();
  const ExcitedBlocks blocks = excited_blocks(p, c, eg.mu);
  st.hessian_min_eig = hessian_min_eig(blocks.A, blocks.B);
  if (st.hessian_min_eig > kHessianTol)
    st.kind = "minimizer";
  else if (st.hessian_min_eig < -kHessianTol)
    st.kind = "saddle";
  else
    st.kind = "degenerate";
  return st;
}

struct SolveOpts {
  double damping = 0.5;   // weight kept on the current iterate
  double tol = 1e-10;     // residual norm target
  int max_iter = 500;
};

// Damped self-consistent iteration that tracks the eigenvector of T + mf(c)
// with the largest overlap with the current iterate instead of always taking
// the lowest branch. Started near a saddle it stays on that branch, which is
// what lets excited stationary points be reached at all.
inline HartreeState solve_stationary(const ModeProblem& p, const Vec& c0, const SolveOpts& opts = {}) {
  if (c0.size() != p.d) fail(ErrorCode::DimensionMismatch, "start vector dimension mismatch");
  if (c0.norm() == 0.0) fail(ErrorCode::ZeroVector, "start vector must be nonzero");
  Vec c = c0 / c0.norm();
  for (int it = 0; it < opts.max_iter; ++it) {
    const Mat mf = meanfield_matrix(p.W, c);
    const Mat F = p.T + mf;
    const Vec Fc = F * c;
    const double mu = std::real(c.dot(Fc));
    if ((Fc - mu * c).norm() <= opts.tol) return make_state(p, c);

    Eigen::SelfAdjointEigenSolver<Mat> es(F);
    int pick = 0;
    double best = -1.0;
    for (int j = 0; j < p.d; ++j) {
      const double ov = std::abs(Cx(es.eigenvectors().col(j).dot(c)));
      if (ov > best) {
        best = ov;
        pick = j;
      }
    }
    Vec v = es.eigenvectors().col(pick);
    const Cx ov = v.dot(c);  // align phase so the mix does not cancel
    if (std::abs(ov) > 0.0) v *= ov / std::abs(ov);
    c = opts.damping * c + (1.0 - opts.damping) * v;
    c /= c.norm();
  }
  fail(ErrorCode::NoConvergence, "self-consistent iteration did not reach tolerance " + fmt17(opts.tol));
}

struct MinimizeOpts {
  int n_starts = 32;
  std::uint64_t seed = 1;
  SolveOpts solve;
  double dedup_tol = 1e-8;  // states with |<c1,c2>| > 1 - dedup_tol are identified
};

// Retention window around the best energy found: converged states above it are
// local minima of higher energy, not candidates for the ground manifold.
inline constexpr double kEnergyWindow = 1e-8;

struct MinimizerSet {
  std::vector<HartreeState> states;  // energy-ascending
  // Set when two retained states are nearly parallel yet not identified by
  // dedup_tol: the signature of a continuous family of minimizers sampled at
  // slightly different points. Reported, never asserted on.
  bool continuous_family_suspected = false;
};

inline MinimizerSet find_minimizers(const ModeProblem& p, const MinimizeOpts& opts = {}) {
  std::vector<Vec> starts;
  Eigen::SelfAdjointEigenSolver<Mat> es(p.T);
  starts.push_back(es.eigenvectors().col(0));
  Rng rng(opts.seed);
  for (int k = 0; k < opts.n_starts; ++k) starts.push_back(rng.unit_vector(p.d));

  std::vector<HartreeState> found(starts.size());
  std::vector<char> ok(starts.size(), 0);
  parallel_for(starts.size(), [&](std::size_t i) {
    try {
      found[i] = solve_stationary(p, starts[i], opts.solve);
      ok[i] = 1;
    } catch (const Error&) {
      ok[i] = 0;  // a start that fails to converge is simply not a sample
    }
  });

  MinimizerSet out;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (!ok[i]) continue;
    const HartreeState& st = found[i];
    if (st.hessian_min_eig <= -kHessianTol) continue;  // saddle, not a minimizer
    bool duplicate = false;
    for (const HartreeState& kept : out.states) {
      const double ov = std::abs(Cx(kept.c.dot(st.c)));
      if (ov > 1.0 - opts.dedup_tol) {
        duplicate = true;
        break;
      }
      if (ov > 0.999) out.continuous_family_suspected = true;
    }
    if (!duplicate) out.states.push_back(st);
  }

  std::sort(out.states.begin(), out.states.end(), [](const HartreeState& a, const HartreeState& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    for (int i = 0; i < a.c.size(); ++i) {
      if (a.c[i].real() != b.c[i].real()) return a.c[i].real() < b.c[i].real();
      if (a.c[i].imag() != b.c[i].imag()) return a.c[i].imag() < b.c[i].imag();
    }
    return false;
  });
  if (!out.states.empty()) {
    const double cap = out.states.front().energy + kEnergyWindow;
    while (out.states.size() > 1 && out.states.back().energy > cap) out.states.pop_back();
  }
  return out;
}

}  // namespace bogolab
