#pragma once

// Primal active-set solvers for the two convex QPs used throughout:
//
//   nonnegative cone:   min 1/2 x'Ax - b'x            s.t. x >= 0
//   scaled simplex:     min 1/2 x'Ax - b'x            s.t. x >= 0, sum(x) = m
//
// A must be symmetric positive definite. At termination the KKT system holds
// to rounding: with g = Ax - b - c (c = 0 for the cone), g = 0 on supp(x) and
// g >= 0 elsewhere. Entering indices are chosen by most negative g with the
// lowest index winning ties; the leaving index is the lowest blocking index.

#include "rieszgreen/core.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace rieszgreen {

struct QpOptions {
  /// Relative threshold below which a negative gradient entry counts as zero.
  double entering_tol = 1e-13;
  /// Reporting tolerance for KKT residuals (relative to `scale`).
  double kkt_tol = 1e-9;
  int max_iterations = 200000;
  /// Accelerated projected-gradient iterations used to guess the support.
  int warm_start_iterations = 400;
  /// Problems smaller than this skip the warm start.
  Index warm_start_min_size = 48;
};

struct QpResult {
  Eigen::VectorXd x;
  /// Multiplier of the sum constraint; zero for the cone problem.
  double multiplier = 0.0;
  /// Ax - b - multiplier.
  Eigen::VectorXd gradient;
  double objective = 0.0;  // 1/2 x'Ax - b'x
  double scale = 1.0;
  double stationarity = 0.0;  // max |g| on supp(x), relative to scale
  double feasibility = 0.0;   // max (-g)_+ anywhere, relative to scale
  int iterations = 0;
  bool converged = false;

  bool kkt_ok(double tol) const { return converged && stationarity <= tol && feasibility <= tol; }
};

namespace detail {

/// Euclidean projection onto {x >= 0, sum x = m}.
inline Eigen::VectorXd project_simplex(const Eigen::VectorXd& v, double m) {
  const Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Index k = 0; k < n; ++k) {
    cumulative += u[static_cast<std::size_t>(k)];
    const double t = (cumulative - m) / static_cast<double>(k + 1);
    if (u[static_cast<std::size_t>(k)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

inline double largest_eigenvalue_estimate(const Eigen::MatrixXd& A) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(A.rows()) / std::sqrt(static_cast<double>(A.rows()));
  double lambda = 0.0;
  for (int it = 0; it < 60; ++it) {
    Eigen::VectorXd w = A * v;
    const double nrm = w.norm();
    if (!(nrm > 0.0)) break;
    lambda = v.dot(w);
    v = w / nrm;
  }
  return lambda;
}

/// FISTA; returns a feasible point used only to seed the active set.
inline Eigen::VectorXd warm_start(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                  std::optional<double> mass, int iterations) {
  const Index n = A.rows();
  const double L = 1.1 * largest_eigenvalue_estimate(A);
  if (!(L > 0.0)) return mass ? Eigen::VectorXd::Constant(n, *mass / static_cast<double>(n)) : Eigen::VectorXd::Zero(n);
  auto project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return mass ? project_simplex(v, *mass) : Eigen::VectorXd(v.cwiseMax(0.0));
  };
  Eigen::VectorXd x = mass ? Eigen::VectorXd::Constant(n, *mass / static_cast<double>(n)) : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = x;
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd xn = project(y - (A * y - b) / L);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = xn + ((t - 1.0) / tn) * (xn - x);
    x = std::move(xn);
    t = tn;
  }
  return x;
}

inline Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& A, const std::vector<Index>& s) {
  const Index k = static_cast<Index>(s.size());
  Eigen::MatrixXd out(k, k);
  for (Index c = 0; c < k; ++c)
    for (Index r = 0; r < k; ++r) out(r, c) = A(s[static_cast<std::size_t>(r)], s[static_cast<std::size_t>(c)]);
  return out;
}

/// Minimizer of the objective over span{e_i : i in s}, with the optional sum
/// constraint. Returns (coefficients on s, multiplier).
inline std::pair<Eigen::VectorXd, double> solve_equality_subproblem(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                                                    const std::vector<Index>& s,
                                                                    std::optional<double> mass) {
  const Index k = static_cast<Index>(s.size());
  if (k == 0) return {Eigen::VectorXd(), 0.0};
  Eigen::LLT<Eigen::MatrixXd> llt(principal_submatrix(A, s));
  if (llt.info() != Eigen::Success) fail(ErrorKind::solver, "active set: principal submatrix is not positive definite");
  Eigen::VectorXd bs(k);
  for (Index r = 0; r < k; ++r) bs[r] = b[s[static_cast<std::size_t>(r)]];
  Eigen::VectorXd u = llt.solve(bs);
  if (!mass) return {u, 0.0};
  Eigen::VectorXd v = llt.solve(Eigen::VectorXd::Ones(k));
  const double c = (*mass - u.sum()) / v.sum();
  return {u + c * v, c};
}

inline QpResult active_set(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, std::optional<double> mass,
                           const QpOptions& opt) {
  const Index n = A.rows();
  if (A.cols() != n || b.size() != n) fail(ErrorKind::solver, "active set: dimension mismatch");
  if (n == 0) fail(ErrorKind::solver, "active set: empty problem");
  if (mass && !(*mass > 0.0)) fail(ErrorKind::solver, "active set: simplex mass must be positive");

  QpResult res;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  std::vector<Index> free_set;
  std::vector<char> in_free(static_cast<std::size_t>(n), 0);

  if (n >= opt.warm_start_min_size && opt.warm_start_iterations > 0) {
    w = warm_start(A, b, mass, opt.warm_start_iterations);
    if (mass) w *= *mass / w.sum();
    for (Index i = 0; i < n; ++i)
      if (w[i] > 0.0) free_set.push_back(i);
  }
  if (mass && free_set.empty()) {
    Index best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      const double val = 0.5 * (*mass) * (*mass) * A(i, i) - (*mass) * b[i];
      if (val < best_val) {
        best_val = val;
        best = i;
      }
    }
    w.setZero();
    w[best] = *mass;
    free_set.push_back(best);
  }
  for (Index i : free_set) in_free[static_cast<std::size_t>(i)] = 1;

  const double b_scale = b.cwiseAbs().maxCoeff();
  double c = 0.0;
  std::vector<char> blocked(static_cast<std::size_t>(n), 0);
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    auto [z, mult] = solve_equality_subproblem(A, b, free_set, mass);
    bool feasible = true;
    for (Index r = 0; r < z.size(); ++r)
      if (z[r] < 0.0) {
        feasible = false;
        break;
      }
    if (feasible) {
      w.setZero();
      for (std::size_t r = 0; r < free_set.size(); ++r) w[free_set[r]] = z[static_cast<Index>(r)];
      c = mult;
      const Eigen::VectorXd g = A * w - b - Eigen::VectorXd::Constant(n, c);
      const double scale = std::max({b_scale, (A * w).cwiseAbs().maxCoeff(), std::abs(c), 1e-300});
      Index enter = -1;
      double most_negative = -opt.entering_tol * scale;
      for (Index i = 0; i < n; ++i) {
        if (in_free[static_cast<std::size_t>(i)] || blocked[static_cast<std::size_t>(i)]) continue;
        if (g[i] < most_negative) {
          most_negative = g[i];
          enter = i;
        }
      }
      if (enter < 0) {
        res.converged = true;
        break;
      }
      free_set.insert(std::lower_bound(free_set.begin(), free_set.end(), enter), enter);
      in_free[static_cast<std::size_t>(enter)] = 1;
      continue;
    }

    // Step towards z until the first weight hits zero.
    double t = 1.0;
    Index leave = -1;
    for (std::size_t r = 0; r < free_set.size(); ++r) {
      const double zr = z[static_cast<Index>(r)];
      if (zr >= 0.0) continue;
      const double wr = w[free_set[r]];
      const double ratio = wr / (wr - zr);
      if (ratio < t) {
        t = ratio;
        leave = free_set[r];
      }
    }
    for (std::size_t r = 0; r < free_set.size(); ++r) {
      const Index i = free_set[r];
      w[i] += t * (z[static_cast<Index>(r)] - w[i]);
    }
    if (t > 0.0) std::fill(blocked.begin(), blocked.end(), 0);
    std::vector<Index> kept;
    kept.reserve(free_set.size());
    for (Index i : free_set) {
      if (i == leave || w[i] <= 0.0) {
        w[i] = 0.0;
        in_free[static_cast<std::size_t>(i)] = 0;
        if (t == 0.0) blocked[static_cast<std::size_t>(i)] = 1;
      } else {
        kept.push_back(i);
      }
    }
    free_set.swap(kept);
    if (mass && free_set.empty()) fail(ErrorKind::solver, "active set: lost all free variables");
  }

  res.iterations = it;
  res.x = w;
  res.multiplier = c;
  res.gradient = A * w - b - Eigen::VectorXd::Constant(n, c);
  res.objective = 0.5 * w.dot(A * w) - b.dot(w);
  res.scale = std::max({b_scale, (A * w).cwiseAbs().maxCoeff(), std::abs(c), 1e-300});
  double stat = 0.0, feas = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (w[i] > 0.0) stat = std::max(stat, std::abs(res.gradient[i]));
    feas = std::max(feas, -res.gradient[i]);
  }
  res.stationarity = stat / res.scale;
  res.feasibility = feas / res.scale;
  return res;
}

}  // namespace detail

/// min 1/2 x'Ax - b'x over x >= 0.
inline QpResult solve_nonneg_qp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const QpOptions& opt = {}) {
  return detail::active_set(A, b, std::nullopt, opt);
}

/// min 1/2 x'Ax - b'x over x >= 0 with sum(x) = mass.
inline QpResult solve_simplex_qp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double mass = 1.0,
                                 const QpOptions& opt = {}) {
  if (A.rows() == 1) {
    QpResult res;
    res.x = Eigen::VectorXd::Constant(1, mass);
    res.multiplier = A(0, 0) * mass - b[0];
    res.gradient = Eigen::VectorXd::Zero(1);
    res.objective = 0.5 * A(0, 0) * mass * mass - b[0] * mass;
    res.scale = std::max({std::abs(b[0]), std::abs(A(0, 0) * mass), 1e-300});
    res.converged = true;
    return res;
  }
  return detail::active_set(A, b, mass, opt);
}

}  // namespace rieszgreen
