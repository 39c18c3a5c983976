#pragma once

#include <vector>

#include "bogolab/common.hpp"

namespace bogolab {

// Dense rank-4 interaction tensor W[m][n][p][q] over d modes, flat layout
// m*d^3 + n*d^2 + p*d + q. Symmetries expected of a real, even two-body
// potential: W[mnpq] == W[nmqp] (pair exchange) and conj(W[mnpq]) == W[pqmn]
// (Hermiticity).
class Tensor4 {
 public:
  Tensor4() : d_(0) {}
  explicit Tensor4(int d) : d_(d), v_(static_cast<std::size_t>(d) * d * d * d, Cx(0, 0)) {}

  int dim() const { return d_; }
  bool empty() const { return d_ == 0; }

  Cx& at(int m, int n, int p, int q) { return v_[idx(m, n, p, q)]; }
  const Cx& at(int m, int n, int p, int q) const { return v_[idx(m, n, p, q)]; }

  std::size_t idx(int m, int n, int p, int q) const {
    return ((static_cast<std::size_t>(m) * d_ + n) * d_ + p) * d_ + q;
  }

  const std::vector<Cx>& flat() const { return v_; }
  std::vector<Cx>& flat() { return v_; }

  double max_abs() const {
    double m = 0.0;
    for (const Cx& x : v_) m = std::max(m, std::abs(x));
    return m;
  }

  bool all_finite() const {
    for (const Cx& x : v_)
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
  }

  double pair_exchange_violation() const {
    double worst = 0.0;
    for (int m = 0; m < d_; ++m)
      for (int n = 0; n < d_; ++n)
        for (int p = 0; p < d_; ++p)
          for (int q = 0; q < d_; ++q)
            worst = std::max(worst, std::abs(at(m, n, p, q) - at(n, m, q, p)));
    return worst;
  }

  double hermiticity_violation() const {
    double worst = 0.0;
    for (int m = 0; m < d_; ++m)
      for (int n = 0; n < d_; ++n)
        for (int p = 0; p < d_; ++p)
          for (int q = 0; q < d_; ++q)
            worst = std::max(worst, std::abs(std::conj(at(m, n, p, q)) - at(p, q, m, n)));
    return worst;
  }

  // View of the tensor as a d^2 x d^2 matrix on the two-body space,
  // rows (m,n), columns (p,q). Hermitian when the tensor symmetries hold.
  Mat pair_matrix() const {
    Mat M(d_ * d_, d_ * d_);
    for (int m = 0; m < d_; ++m)
      for (int n = 0; n < d_; ++n)
        for (int p = 0; p < d_; ++p)
          for (int q = 0; q < d_; ++q) M(m * d_ + n, p * d_ + q) = at(m, n, p, q);
    return M;
  }

  static Tensor4 from_pair_matrix(const Mat& M, int d) {
    Tensor4 t(d);
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n)
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q) t.at(m, n, p, q) = M(m * d + n, p * d + q);
    return t;
  }

  // Change of one-body basis with unitary G (columns are the new modes):
  // out[a,b,g,h] = sum conj(G[m,a]) conj(G[n,b]) W[m,n,p,q] G[p,g] G[q,h].
  // Contracted one leg at a time, O(d^5).
  Tensor4 rotated(const Mat& G) const {
    Tensor4 cur = *this;
    cur = cur.contract_leg(0, G.adjoint());
    cur = cur.contract_leg(1, G.adjoint());
    cur = cur.contract_leg(2, G.transpose());
    cur = cur.contract_leg(3, G.transpose());
    return cur;
  }

 private:
  // out[... a ...] = sum_m M(a, m) in[... m ...] on the chosen leg.
  Tensor4 contract_leg(int leg, const Mat& M) const {
    Tensor4 out(d_);
    for (int m = 0; m < d_; ++m)
      for (int n = 0; n < d_; ++n)
        for (int p = 0; p < d_; ++p)
          for (int q = 0; q < d_; ++q) {
            Cx acc(0, 0);
            for (int s = 0; s < d_; ++s) {
              switch (leg) {
                case 0: acc += M(m, s) * at(s, n, p, q); break;
                case 1: acc += M(n, s) * at(m, s, p, q); break;
                case 2: acc += M(p, s) * at(m, n, s, q); break;
                default: acc += M(q, s) * at(m, n, p, s); break;
              }
            }
            out.at(m, n, p, q) = acc;
          }
    return out;
  }

  int d_;
  std::vector<Cx> v_;
};

}  // namespace bogolab
