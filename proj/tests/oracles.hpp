#pragma once

// Reference solvers for tests. They share no code with the library solvers.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

using Index = Eigen::Index;

inline double objective(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(a * x) - b.dot(x);
}

// Exhaustive search over supports: the unique minimizer is the best
// feasible stationary point of some support.
inline Eigen::VectorXd brute_force_qp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, std::optional<double> mass) {
  const Index n = a.rows();
  Eigen::VectorXd best;
  double best_val = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<Index> s;
    for (Index i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);
    const Index k = static_cast<Index>(s.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k + (mass ? 1 : 0), k + (mass ? 1 : 0));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.rows());
    for (Index r = 0; r < k; ++r) {
      for (Index c = 0; c < k; ++c) m(r, c) = a(s[r], s[c]);
      rhs[r] = b[s[r]];
      if (mass) m(r, k) = m(k, r) = -1.0;
    }
    if (mass) {
      for (Index r = 0; r < k; ++r) m(k, r) = 1.0;
      rhs[k] = *mass;
    }
    const Eigen::VectorXd z = m.fullPivLu().solve(rhs);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    bool ok = true;
    for (Index r = 0; r < k; ++r) {
      if (z[r] < -1e-14) ok = false;
      x[s[r]] = std::max(0.0, z[r]);
    }
    if (ok && objective(a, b, x) < best_val) {
      best_val = objective(a, b, x);
      best = x;
    }
  }
  if (!mass) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    if (objective(a, b, zero) < best_val) best = zero;
  }
  return best;
}


/// Minimizes a smooth function of t on [lo, hi] by dense sampling followed by
/// golden-section refinement.
template <class F>
double argmin_1d(F f, double lo, double hi) {
  double best = lo, best_val = f(lo);
  for (int k = 1; k <= 2000; ++k) {
    const double t = lo + (hi - lo) * k / 2000.0;
    if (f(t) < best_val) {
      best_val = f(t);
      best = t;
    }
  }
  double a = std::max(lo, best - (hi - lo) / 1000.0), b = std::min(hi, best + (hi - lo) / 1000.0);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (f(c) < f(d))
      b = d;
    else
      a = c;
  }
  return 0.5 * (a + b);
}

}  // namespace oracle
