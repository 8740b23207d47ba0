#pragma once

// Green kernel of D obtained by subtracting from the Riesz kernel the
// potential of each Dirac mass swept onto the complement sample Y.
//
// Index spaces: "full" rows enumerate D u Y in increasing global order, "D"
// rows enumerate D in increasing global order. Every measure taken or
// returned by this header lives on D rows.

#include "rieszgreen/active_set.hpp"
#include "rieszgreen/balayage.hpp"
#include "rieszgreen/core.hpp"
#include "rieszgreen/riesz.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace rieszgreen {

struct GreenOptions {
  double sigma = 1.0;
  QpOptions qp{};
  /// Relative disagreement between the two Green balayage routes that raises a warning.
  double path_warning = 1e-8;
};

class GreenSystem {
 public:
  const DomainConfig& config() const noexcept { return *cfg_; }
  const KernelMatrix& riesz_full() const noexcept { return riesz_full_; }
  const KernelMatrix& green() const noexcept { return green_; }
  const SweepMatrix& dirac_sweep_to_y() const noexcept { return to_y_; }
  double asymmetry_residual() const noexcept { return asymmetry_; }
  /// min_ij g_ij and max_ij (g_ij - kappa_ij) over D rows.
  double min_entry() const noexcept { return min_entry_; }
  double max_excess_over_riesz() const noexcept { return max_excess_; }
  const GreenOptions& options() const noexcept { return opt_; }

  Index size() const noexcept { return green_.size(); }
  const IndexSet& f_rows() const noexcept { return f_rows_; }
  const IndexSet& omega_rows() const noexcept { return omega_rows_; }
  const IndexSet& d_full_rows() const noexcept { return d_full_; }
  const IndexSet& y_full_rows() const noexcept { return y_full_; }
  const IndexSet& f_full_rows() const noexcept { return f_full_; }

  /// Global point index of D row r.
  Index global(Index d_row) const { return config().d()[static_cast<std::size_t>(d_row)]; }
  /// D row of a global point index; -1 when the point is not in D.
  Index d_row(Index global_index) const {
    const auto& d = config().d();
    const auto it = std::lower_bound(d.begin(), d.end(), global_index);
    return (it != d.end() && *it == global_index) ? static_cast<Index>(it - d.begin()) : -1;
  }
  IndexSet d_rows(const IndexSet& globals) const {
    IndexSet out;
    for (Index g : globals) {
      const Index r = d_row(g);
      if (r < 0) fail(ErrorKind::validation, "GreenSystem: point " + std::to_string(g) + " is not in D");
      out.push_back(r);
    }
    return normalized(out);
  }
  Eigen::VectorXd d_point(Index d_row) const { return config().points().point(global(d_row)); }

  /// D-row measure lifted to full rows.
  DiscreteMeasure to_full(const DiscreteMeasure& mu) const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(riesz_full_.size());
    for (Index r = 0; r < mu.size(); ++r) w[d_full_[static_cast<std::size_t>(r)]] = mu[r];
    return DiscreteMeasure(std::move(w));
  }
  /// Full-row measure restricted to D rows.
  DiscreteMeasure to_d(const DiscreteMeasure& full) const {
    Eigen::VectorXd w(size());
    for (Index r = 0; r < size(); ++r) w[r] = full[d_full_[static_cast<std::size_t>(r)]];
    return DiscreteMeasure(std::move(w));
  }

  friend GreenSystem build_green(const DomainConfig& cfg, const GreenOptions& opt);

 private:
  std::shared_ptr<const DomainConfig> cfg_;
  KernelMatrix riesz_full_;
  KernelMatrix green_;
  SweepMatrix to_y_;
  double asymmetry_ = 0.0;
  double min_entry_ = 0.0;
  double max_excess_ = 0.0;
  GreenOptions opt_;
  IndexSet f_rows_, omega_rows_, d_full_, y_full_, f_full_;
};

inline GreenSystem build_green(const DomainConfig& cfg, const GreenOptions& opt = {}) {
  GreenSystem gs;
  gs.cfg_ = std::make_shared<const DomainConfig>(cfg);
  gs.opt_ = opt;
  const IndexSet all = set_union(cfg.d(), cfg.y());
  gs.riesz_full_ = assemble_riesz(cfg.points(), cfg.alpha(), opt.sigma, all);
  auto full_row = [&all](Index g) { return static_cast<Index>(std::lower_bound(all.begin(), all.end(), g) - all.begin()); };
  for (Index g : cfg.d()) gs.d_full_.push_back(full_row(g));
  for (Index g : cfg.y()) gs.y_full_.push_back(full_row(g));
  for (Index g : cfg.f()) gs.f_full_.push_back(full_row(g));
  gs.f_rows_ = gs.d_rows(cfg.f());
  gs.omega_rows_ = gs.d_rows(cfg.omega());

  const Eigen::MatrixXd kdd = gs.riesz_full_.block(gs.d_full_);
  Eigen::MatrixXd g = kdd;
  if (!cfg.y().empty()) {
    gs.to_y_ = dirac_sweep_matrix(gs.riesz_full_, gs.d_full_, gs.y_full_, opt.qp);
    // swept(j, i) = U^{(eps_i)^Y}(x_j)
    const Eigen::MatrixXd swept = gs.riesz_full_.block(gs.d_full_, gs.y_full_) * gs.to_y_.weights;
    g = kdd - swept.transpose();
    const double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
    gs.asymmetry_ = asym / std::max(g.cwiseAbs().maxCoeff(), 1e-300);
    for (Index j = 0; j < g.cols(); ++j)
      for (Index i = j + 1; i < g.rows(); ++i) {
        const double avg = 0.5 * (g(i, j) + g(j, i));
        g(i, j) = avg;
        g(j, i) = avg;
      }
  }
  gs.min_entry_ = g.minCoeff();
  gs.max_excess_ = (g - kdd).maxCoeff();
  gs.green_ = KernelMatrix::from_entries(std::move(g), KernelKind::green, cfg.alpha(), cfg.dim(), cfg.d());
  return gs;
}

struct GreenPotential {
  Eigen::VectorXd values;  // over D rows, route (i)
  double cross_path_residual = 0.0;
};

/// Route (i): Green matrix times weights. Route (ii): Riesz potential minus
/// the Riesz potential of the sweep onto Y.
inline GreenPotential green_potential(const GreenSystem& gs, const DiscreteMeasure& mu) {
  check_measure(gs.green(), mu, "green_potential");
  GreenPotential out;
  out.values = potential(gs.green(), mu);
  const DiscreteMeasure full = gs.to_full(mu);
  Eigen::VectorXd u_full = potential(gs.riesz_full(), full);
  double scale = 0.0;
  for (Index r : gs.d_full_rows()) scale = std::max(scale, std::abs(u_full[r]));
  if (!gs.y_full_rows().empty() && !mu.is_zero()) {
    const BalayageResult toy = sweep(gs.riesz_full(), full, gs.y_full_rows(), SweepAlgorithm::cone_projection,
                                     gs.options().qp);
    u_full -= potential(gs.riesz_full(), toy.swept);
  }
  double resid = 0.0;
  for (Index r = 0; r < gs.size(); ++r)
    resid = std::max(resid, std::abs(out.values[r] - u_full[gs.d_full_rows()[static_cast<std::size_t>(r)]]));
  out.cross_path_residual = scale > 0.0 ? resid / scale : resid;
  return out;
}

/// Green balayage of mu onto the D rows `f`. The returned measure is the cone
/// projection in the Green norm; the route through the Riesz sweep onto f u Y
/// is recorded in `path_discrepancy` (relative to the input mass).
inline BalayageResult green_sweep(const GreenSystem& gs, const DiscreteMeasure& mu, IndexSet f) {
  f = normalized(std::move(f));
  BalayageResult res = sweep(gs.green(), mu, f, SweepAlgorithm::cone_projection, gs.options().qp);
  if (res.algorithm == "identity") return res;

  IndexSet f_full;
  for (Index r : f) f_full.push_back(gs.d_full_rows()[static_cast<std::size_t>(r)]);
  const IndexSet target = set_union(normalized(f_full), gs.y_full_rows());
  const BalayageResult riesz = sweep(gs.riesz_full(), gs.to_full(mu), target, SweepAlgorithm::cone_projection,
                                     gs.options().qp);
  const DiscreteMeasure via_riesz = restrict(gs.to_d(riesz.swept), f);
  const double diff = (via_riesz.weights() - res.swept.weights()).cwiseAbs().maxCoeff();
  res.path_discrepancy = res.mass_in > 0.0 ? diff / res.mass_in : diff;
  res.warning = res.path_discrepancy > gs.options().path_warning;
  return res;
}

struct GreenEquilibrium {
  double capacity = 0.0;
  DiscreteMeasure gamma;
  EquilibriumResult equilibrium;
  CapacityResult capacity_problem;
};

inline GreenEquilibrium green_equilibrium(const GreenSystem& gs, const IndexSet& f) {
  GreenEquilibrium out;
  out.equilibrium = equilibrium_measure(gs.green(), f, gs.options().qp);
  out.capacity_problem = capacity(gs.green(), f, gs.options().qp);
  out.capacity = out.capacity_problem.capacity;
  out.gamma = out.equilibrium.gamma;
  return out;
}

struct MaxPrincipleReport {
  bool frostman_hypothesis = false;
  double frostman_excess = 0.0;  // max_D U^mu - 1
  bool domination_hypothesis = false;
  double domination_excess = 0.0;  // max_D (U^mu - U^nu)
};

/// Empirical Frostman and domination checks for Green potentials; never throws
/// on a violated conclusion.
inline MaxPrincipleReport check_maximum_principles(const GreenSystem& gs, const DiscreteMeasure& mu,
                                                   const DiscreteMeasure& nu, double tol = 1e-9) {
  MaxPrincipleReport rep;
  const Eigen::VectorXd um = potential(gs.green(), mu);
  const Eigen::VectorXd un = potential(gs.green(), nu);
  const IndexSet supp = mu.support();
  double max_on_supp = -std::numeric_limits<double>::infinity();
  bool dominated = true;
  const double scale = std::max({um.cwiseAbs().maxCoeff(), un.cwiseAbs().maxCoeff(), 1e-300});
  for (Index i : supp) {
    max_on_supp = std::max(max_on_supp, um[i]);
    if (um[i] > un[i] + tol * scale) dominated = false;
  }
  rep.frostman_hypothesis = !supp.empty() && max_on_supp <= 1.0 + tol;
  if (rep.frostman_hypothesis) rep.frostman_excess = um.maxCoeff() - 1.0;
  rep.domination_hypothesis = dominated;
  if (dominated) rep.domination_excess = (um - un).maxCoeff();
  return rep;
}

struct MassEqualityReport {
  double delta_mass = 0.0;  // mu(D) - mass of the Green sweep onto F
  IndexSet sources;         // D rows of supp(mu|Omega)
  std::vector<double> deficiencies;  // omega(x, {inf} u Y; Omega) = 1 - (eps_x)^{F u Y}(F)
  double weighted_deficiency = 0.0;
};

inline MassEqualityReport mass_equality_probe(const GreenSystem& gs, const DiscreteMeasure& mu) {
  MassEqualityReport rep;
  rep.sources = restrict(mu, gs.omega_rows()).support();
  if (rep.sources.empty()) {
    // mu carried by F: the sweep is the identity.
    rep.delta_mass = 0.0;
    return rep;
  }
  rep.delta_mass = mu.total_mass() - green_sweep(gs, mu, gs.f_rows()).mass_out;
  IndexSet src_full;
  for (Index r : rep.sources) src_full.push_back(gs.d_full_rows()[static_cast<std::size_t>(r)]);
  const IndexSet target = set_union(gs.f_full_rows(), gs.y_full_rows());
  const SweepMatrix sm = dirac_sweep_matrix(gs.riesz_full(), src_full, target, gs.options().qp);
  std::vector<char> is_f(target.size(), 0);
  for (std::size_t t = 0; t < target.size(); ++t)
    is_f[t] = std::binary_search(gs.f_full_rows().begin(), gs.f_full_rows().end(), target[t]);
  for (std::size_t s = 0; s < rep.sources.size(); ++s) {
    double on_f = 0.0;
    for (std::size_t t = 0; t < target.size(); ++t)
      if (is_f[t]) on_f += sm.weights(static_cast<Index>(t), static_cast<Index>(s));
    const double def = 1.0 - on_f;
    rep.deficiencies.push_back(def);
    rep.weighted_deficiency += mu[rep.sources[s]] * def;
  }
  return rep;
}

}  // namespace rieszgreen
