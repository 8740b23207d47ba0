#pragma once

// Riesz kernel matrices, potentials, energies, capacities and equilibrium
// measures on finite point clouds.

#include "rieszgreen/active_set.hpp"
#include "rieszgreen/core.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <string>

namespace rieszgreen {

enum class KernelKind { riesz, green };

inline const char* to_string(KernelKind k) { return k == KernelKind::riesz ? "riesz" : "green"; }

/// |x - y|^(alpha - n).
inline double riesz_kernel(double distance, double alpha, int dim) {
  return std::pow(distance, alpha - static_cast<double>(dim));
}

/// Symmetric positive definite kernel matrix. Row r corresponds to point
/// `points()[r]` of the underlying point set; measures passed to the
/// functions below are indexed by row.
class KernelMatrix {
 public:
  KernelMatrix() = default;

  /// Validates exact symmetry and positive definiteness.
  static KernelMatrix from_entries(Eigen::MatrixXd entries, KernelKind kind, double alpha, int dim,
                                   IndexSet points = {}) {
    KernelMatrix k;
    if (entries.rows() != entries.cols()) fail(ErrorKind::solver, "KernelMatrix: matrix must be square");
    if (points.empty()) points = iota_set(entries.rows());
    if (static_cast<Index>(points.size()) != entries.rows())
      fail(ErrorKind::solver, "KernelMatrix: point map size mismatch");
    for (Index j = 0; j < entries.cols(); ++j)
      for (Index i = j + 1; i < entries.rows(); ++i)
        if (entries(i, j) != entries(j, i)) fail(ErrorKind::solver, "KernelMatrix: matrix is not exactly symmetric");
    k.entries_ = std::move(entries);
    k.kind_ = kind;
    k.alpha_ = alpha;
    k.dim_ = dim;
    k.points_ = std::move(points);
    auto llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(k.entries_);
    if (llt->info() != Eigen::Success)
      fail(ErrorKind::solver, std::string("KernelMatrix: ") + to_string(kind) +
                                  " matrix failed the Cholesky check (refine sampling or shrink cell radii)");
    k.min_pivot_ = llt->matrixLLT().diagonal().array().square().minCoeff();
    k.factor_ = std::move(llt);
    return k;
  }

  Index size() const noexcept { return entries_.rows(); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }
  KernelKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  int dim() const noexcept { return dim_; }
  const IndexSet& points() const noexcept { return points_; }
  double min_pivot() const noexcept { return min_pivot_; }
  const Eigen::LLT<Eigen::MatrixXd>& factor() const { return *factor_; }

  Eigen::MatrixXd block(const IndexSet& rows, const IndexSet& cols) const {
    Eigen::MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Index>(r), static_cast<Index>(c)) = entries_(rows[r], cols[c]);
    return out;
  }
  Eigen::MatrixXd block(const IndexSet& rows) const { return block(rows, rows); }

 private:
  Eigen::MatrixXd entries_;
  KernelKind kind_ = KernelKind::riesz;
  double alpha_ = 2.0;
  int dim_ = 3;
  IndexSet points_;
  double min_pivot_ = 0.0;
  std::shared_ptr<const Eigen::LLT<Eigen::MatrixXd>> factor_;
};

/// Riesz matrix over `subset` (all points when empty). Diagonal entries use the
/// cell surrogate (sigma * cell_radius)^(alpha - n).
inline KernelMatrix assemble_riesz(const PointSet& ps, double alpha, double sigma = 1.0, IndexSet subset = {}) {
  DomainConfig::check_alpha(alpha, ps.dim());
  if (!(sigma > 0.0 && sigma <= 1.0)) fail(ErrorKind::validation, "assemble_riesz: sigma must lie in (0, 1]");
  if (subset.empty()) subset = iota_set(ps.size());
  const Index m = static_cast<Index>(subset.size());
  const int n = ps.dim();
  Eigen::MatrixXd K(m, m);
  for (Index c = 0; c < m; ++c) {
    const Index pc = subset[static_cast<std::size_t>(c)];
    K(c, c) = riesz_kernel(sigma * ps.cell_radius(pc), alpha, n);
    for (Index r = c + 1; r < m; ++r) {
      const double v = riesz_kernel(ps.distance(subset[static_cast<std::size_t>(r)], pc), alpha, n);
      K(r, c) = v;
      K(c, r) = v;
    }
  }
  return KernelMatrix::from_entries(std::move(K), KernelKind::riesz, alpha, n, std::move(subset));
}

inline void check_measure(const KernelMatrix& K, const DiscreteMeasure& mu, const char* where) {
  if (mu.size() != K.size()) fail(ErrorKind::validation, std::string(where) + ": measure size does not match kernel");
}

/// U[i] = sum_j K[i][j] mu[j].
inline Eigen::VectorXd potential(const KernelMatrix& K, const DiscreteMeasure& mu) {
  check_measure(K, mu, "potential");
  return K.entries() * mu.weights();
}

inline double mutual_energy(const KernelMatrix& K, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_measure(K, mu, "mutual_energy");
  check_measure(K, nu, "mutual_energy");
  return mu.weights().dot(K.entries() * nu.weights());
}

inline double energy_norm(const KernelMatrix& K, const DiscreteMeasure& mu) {
  return std::sqrt(std::max(0.0, mutual_energy(K, mu, mu)));
}

/// Energy norm of a signed combination, used for distances between measures.
inline double energy_norm(const KernelMatrix& K, const Eigen::VectorXd& signed_weights) {
  return std::sqrt(std::max(0.0, signed_weights.dot(K.entries() * signed_weights)));
}

struct CapacityResult {
  double capacity = 0.0;
  double min_energy = 0.0;
  DiscreteMeasure minimizer;  // probability measure on the set
  QpResult qp;
};

inline DiscreteMeasure scatter(Index size, const IndexSet& idx, const Eigen::VectorXd& local) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(size);
  for (std::size_t k = 0; k < idx.size(); ++k) w[idx[k]] = std::max(0.0, local[static_cast<Index>(k)]);
  return DiscreteMeasure(std::move(w));
}

inline Eigen::VectorXd gather(const Eigen::VectorXd& v, const IndexSet& idx) {
  Eigen::VectorXd out(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Index>(k)] = v[idx[k]];
  return out;
}

inline void check_index_set(const KernelMatrix& K, const IndexSet& a, const char* where) {
  if (a.empty()) fail(ErrorKind::validation, std::string(where) + ": index set must be nonempty");
  if (a.front() < 0 || a.back() >= K.size()) fail(ErrorKind::validation, std::string(where) + ": index out of range");
}

/// Capacity 1 / min ||mu||^2 over probability measures on `a`.
inline CapacityResult capacity(const KernelMatrix& K, IndexSet a, const QpOptions& opt = {}) {
  a = normalized(std::move(a));
  check_index_set(K, a, "capacity");
  CapacityResult res;
  const Eigen::MatrixXd Kaa = K.block(a);
  res.qp = solve_simplex_qp(Kaa, Eigen::VectorXd::Zero(static_cast<Index>(a.size())), 1.0, opt);
  res.min_energy = res.qp.x.dot(Kaa * res.qp.x);
  res.capacity = 1.0 / res.min_energy;
  res.minimizer = scatter(K.size(), a, res.qp.x);
  return res;
}

struct EquilibriumResult {
  DiscreteMeasure gamma;
  Eigen::VectorXd potential;  // over all rows of K
  double mass = 0.0;
  double min_potential_on_set = 0.0;
  /// sum_i gamma_i (U_i - 1), zero at an exact solution.
  double complementarity = 0.0;
  QpResult qp;
};

/// Equilibrium measure on `a`: U = 1 on its support and U >= 1 on `a`.
inline EquilibriumResult equilibrium_measure(const KernelMatrix& K, IndexSet a, const QpOptions& opt = {}) {
  a = normalized(std::move(a));
  check_index_set(K, a, "equilibrium_measure");
  EquilibriumResult res;
  const Eigen::MatrixXd Kaa = K.block(a);
  if (a.size() == 1) {
    res.qp.x = Eigen::VectorXd::Constant(1, 1.0 / Kaa(0, 0));
    res.qp.gradient = Eigen::VectorXd::Zero(1);
    res.qp.converged = true;
  } else {
    res.qp = solve_nonneg_qp(Kaa, Eigen::VectorXd::Ones(static_cast<Index>(a.size())), opt);
  }
  res.gamma = scatter(K.size(), a, res.qp.x);
  res.potential = potential(K, res.gamma);
  res.mass = res.gamma.total_mass();
  res.min_potential_on_set = gather(res.potential, a).minCoeff();
  res.complementarity = 0.0;
  for (Index i : a) res.complementarity += res.gamma[i] * (res.potential[i] - 1.0);
  return res;
}

}  // namespace rieszgreen
