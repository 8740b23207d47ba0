#pragma once

// Riesz balayage as projection onto the cone of measures carried by a target
// set, Dirac sweep matrices, harmonic measure and thinness diagnostics.

#include "rieszgreen/active_set.hpp"
#include "rieszgreen/core.hpp"
#include "rieszgreen/riesz.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

namespace rieszgreen {

enum class SweepAlgorithm {
  /// (a) active-set projection in the energy norm; always valid.
  cone_projection,
  /// (b) K_qq w = (K xi)_q, falling back to (a) when a weight is negative.
  direct_with_fallback,
};

struct KktResiduals {
  double equality = 0.0;    // max |U^swept - U^xi| on supp(swept)
  double inequality = 0.0;  // max (U^xi - U^swept)_+ on q
  double domination = 0.0;  // max (U^swept - U^xi)_+ off q (empirical)
};

struct BalayageResult {
  DiscreteMeasure swept;
  double mass_in = 0.0;
  double mass_out = 0.0;
  KktResiduals kkt;  // relative to `scale`
  double scale = 1.0;
  std::string algorithm;  // "identity", "direct" or "cone"
  Index active_set_size = 0;
  bool warning = false;
  double path_discrepancy = 0.0;  // only set by Green balayage
};

namespace detail {

inline KktResiduals sweep_residuals(const KernelMatrix& K, const DiscreteMeasure& xi, const DiscreteMeasure& nu,
                                    const IndexSet& q, double& scale) {
  const Eigen::VectorXd u_xi = potential(K, xi);
  const Eigen::VectorXd u_nu = potential(K, nu);
  scale = 0.0;
  for (Index i : q) scale = std::max(scale, std::abs(u_xi[i]));
  if (!(scale > 0.0)) scale = 1.0;
  KktResiduals r;
  std::vector<char> in_q(static_cast<std::size_t>(K.size()), 0);
  for (Index i : q) in_q[static_cast<std::size_t>(i)] = 1;
  for (Index i = 0; i < K.size(); ++i) {
    const double diff = u_nu[i] - u_xi[i];
    if (in_q[static_cast<std::size_t>(i)]) {
      if (nu[i] > 0.0) r.equality = std::max(r.equality, std::abs(diff));
      r.inequality = std::max(r.inequality, -diff);
    } else {
      r.domination = std::max(r.domination, diff);
    }
  }
  r.equality /= scale;
  r.inequality /= scale;
  r.domination /= scale;
  return r;
}

}  // namespace detail

/// Balayage of `xi` onto the rows `q` of K.
inline BalayageResult sweep(const KernelMatrix& K, const DiscreteMeasure& xi, IndexSet q,
                            SweepAlgorithm algorithm = SweepAlgorithm::cone_projection, const QpOptions& opt = {}) {
  q = normalized(std::move(q));
  check_index_set(K, q, "sweep");
  check_measure(K, xi, "sweep");
  BalayageResult res;
  res.mass_in = xi.total_mass();

  if (is_subset(xi.support(), q)) {
    res.swept = xi;
    res.algorithm = "identity";
  } else {
    const Eigen::MatrixXd Kqq = K.block(q);
    const Eigen::VectorXd b = gather(potential(K, xi), q);
    bool done = false;
    if (algorithm == SweepAlgorithm::direct_with_fallback) {
      Eigen::LLT<Eigen::MatrixXd> llt(Kqq);
      if (llt.info() != Eigen::Success) fail(ErrorKind::solver, "sweep: target block is not positive definite");
      const Eigen::VectorXd w = llt.solve(b);
      if ((w.array() >= 0.0).all()) {
        res.swept = scatter(K.size(), q, w);
        res.algorithm = "direct";
        done = true;
      }
    }
    if (!done) {
      const QpResult qp = solve_nonneg_qp(Kqq, b, opt);
      res.swept = scatter(K.size(), q, qp.x);
      res.algorithm = "cone";
    }
  }
  res.mass_out = res.swept.total_mass();
  res.active_set_size = static_cast<Index>(res.swept.support().size());
  res.kkt = detail::sweep_residuals(K, xi, res.swept, q, res.scale);
  return res;
}

/// Columns are the sweeps of unit Dirac masses at `sources` onto `targets`.
struct SweepMatrix {
  IndexSet sources;
  IndexSet targets;
  Eigen::MatrixXd weights;  // |targets| x |sources|
  Index fallback_columns = 0;

  /// Superposition sum_x xi[x] * column(x), scattered to kernel rows.
  Eigen::VectorXd superpose(const DiscreteMeasure& xi, Index size) const {
    Eigen::VectorXd local = Eigen::VectorXd::Zero(static_cast<Index>(targets.size()));
    for (std::size_t s = 0; s < sources.size(); ++s) local += xi[sources[s]] * weights.col(static_cast<Index>(s));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(size);
    for (std::size_t t = 0; t < targets.size(); ++t) out[targets[t]] = local[static_cast<Index>(t)];
    return out;
  }

  Eigen::VectorXd column_masses() const { return weights.colwise().sum().transpose(); }
};

inline SweepMatrix dirac_sweep_matrix(const KernelMatrix& K, IndexSet sources, IndexSet q, const QpOptions& opt = {}) {
  q = normalized(std::move(q));
  sources = normalized(std::move(sources));
  check_index_set(K, q, "dirac_sweep_matrix");
  SweepMatrix sm;
  sm.sources = sources;
  sm.targets = q;
  const Index nq = static_cast<Index>(q.size());
  sm.weights = Eigen::MatrixXd::Zero(nq, static_cast<Index>(sources.size()));
  if (sources.empty()) return sm;

  const Eigen::MatrixXd Kqq = K.block(q);
  const Eigen::MatrixXd rhs = K.block(q, sources);
  Eigen::LLT<Eigen::MatrixXd> llt(Kqq);
  if (llt.info() != Eigen::Success) fail(ErrorKind::solver, "dirac_sweep_matrix: target block is not positive definite");
  Eigen::MatrixXd direct = llt.solve(rhs);

  for (std::size_t s = 0; s < sources.size(); ++s) {
    const Index col = static_cast<Index>(s);
    const auto hit = std::lower_bound(q.begin(), q.end(), sources[s]);
    if (hit != q.end() && *hit == sources[s]) {
      sm.weights(hit - q.begin(), col) = 1.0;
      continue;
    }
    if ((direct.col(col).array() >= 0.0).all()) {
      sm.weights.col(col) = direct.col(col);
    } else {
      sm.weights.col(col) = solve_nonneg_qp(Kqq, rhs.col(col), opt).x;
      ++sm.fallback_columns;
    }
  }
  return sm;
}

/// 1 - mass of the sweep of eps_x onto the complement set; 1 when it is empty.
inline double harmonic_measure_at_infinity(const KernelMatrix& K, Index x, const IndexSet& delta_complement,
                                           const QpOptions& opt = {}) {
  if (delta_complement.empty()) return 1.0;
  const IndexSet dc = normalized(delta_complement);
  if (std::binary_search(dc.begin(), dc.end(), x))
    fail(ErrorKind::validation, "harmonic_measure_at_infinity: source lies in the complement set");
  return 1.0 - sweep(K, DiscreteMeasure::dirac(K.size(), x), dc, SweepAlgorithm::cone_projection, opt).mass_out;
}

/// Harmonic measure of the event e (a subset of the complement set): swept mass on e.
inline double harmonic_measure(const KernelMatrix& K, Index x, const IndexSet& delta_complement, const IndexSet& event,
                               const QpOptions& opt = {}) {
  if (delta_complement.empty()) return 0.0;
  const BalayageResult r = sweep(K, DiscreteMeasure::dirac(K.size(), x), delta_complement,
                                 SweepAlgorithm::cone_projection, opt);
  return r.swept.mass_on(normalized(event));
}

enum class ThinnessTrend { saturated, growing };

inline const char* to_string(ThinnessTrend t) { return t == ThinnessTrend::saturated ? "saturated" : "growing"; }

struct ThinnessReport {
  std::vector<Index> shell_sizes;
  std::vector<double> shell_capacity;
  std::vector<double> terms;  // c(Q_j) / q^(j (n - alpha))
  std::vector<double> partial_sums;
  ThinnessTrend trend = ThinnessTrend::saturated;
};

/// Partial sums of the thinness-at-infinity series over the shells
/// q^j < |y - center| <= q^(j+1), j = 0..j_max-1, of the sampled set Q.
inline ThinnessReport thinness_partial_sums(const PointSet& ps, double alpha, const IndexSet& q_set,
                                            const Eigen::VectorXd& center, double q_ratio, int j_max,
                                            double sigma = 1.0, const QpOptions& opt = {}) {
  if (!(q_ratio > 1.0)) fail(ErrorKind::validation, "thinness_partial_sums: ratio must exceed 1");
  if (j_max < 1) fail(ErrorKind::validation, "thinness_partial_sums: need at least one shell");
  DomainConfig::check_alpha(alpha, ps.dim());
  ThinnessReport rep;
  double running = 0.0;
  const double decay = static_cast<double>(ps.dim()) - alpha;
  for (int j = 0; j < j_max; ++j) {
    const double lo = std::pow(q_ratio, j);
    const double hi = std::pow(q_ratio, j + 1);
    IndexSet shell;
    for (Index i : q_set) {
      const double r = (ps.point(i) - center).norm();
      if (r > lo && r <= hi) shell.push_back(i);
    }
    double cap = 0.0;
    if (!shell.empty()) {
      const KernelMatrix K = assemble_riesz(ps, alpha, sigma, shell);
      cap = capacity(K, iota_set(K.size()), opt).capacity;
    }
    const double term = cap / std::pow(q_ratio, j * decay);
    running += term;
    rep.shell_sizes.push_back(static_cast<Index>(shell.size()));
    rep.shell_capacity.push_back(cap);
    rep.terms.push_back(term);
    rep.partial_sums.push_back(running);
  }
  double peak = 0.0;
  for (double t : rep.terms) peak = std::max(peak, t);
  rep.trend = (peak > 0.0 && rep.terms.back() >= 0.25 * peak) ? ThinnessTrend::growing : ThinnessTrend::saturated;
  return rep;
}

}  // namespace rieszgreen
