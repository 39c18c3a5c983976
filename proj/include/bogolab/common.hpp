#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "bogolab/errors.hpp"

namespace bogolab {

using Cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

// Deterministic RNG. mt19937_64's output sequence is fixed by the standard;
// uniform/gaussian are derived from raw bits directly (std::*_distribution is
// implementation-defined and would break run-to-run reproducibility across
// standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0,1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Cx complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Cx(re, im);
  }

  Vec unit_vector(int d) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = complex_gaussian();
    const double n = v.norm();
    if (n == 0.0) {
      v.setZero();
      v[0] = 1.0;
      return v;
    }
    return v / n;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline int thread_budget() {
  if (const char* env = std::getenv("BOGOLAB_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<int>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n). Jobs must be independent; results keyed by
// index stay deterministic regardless of the thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int budget = thread_budget();
  if (budget <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(budget, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// 17 significant digits round-trip doubles exactly through decimal text.
inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

// Gauge convention used everywhere a condensate vector is exposed: rotate the
// global phase so the largest-modulus entry is real positive; ties resolve to
// the lowest index.
inline Vec gauge_fix(const Vec& c) {
  int best = 0;
  double best_mod = std::abs(c[0]);
  for (int i = 1; i < c.size(); ++i) {
    const double m = std::abs(c[i]);
    if (m > best_mod) {
      best_mod = m;
      best = i;
    }
  }
  if (best_mod == 0.0) return c;
  const Cx phase = c[best] / best_mod;
  return c * std::conj(phase);
}

inline bool approx_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol;
}

}  // namespace bogolab
