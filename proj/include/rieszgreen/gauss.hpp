#pragma once

// Weighted minimum Green energy (Gauss) problem on a discrete F:
//
//   minimize  I_f(mu) = ||mu||_g^2 - 2 <U^theta_g, mu>   over probability mu on F,
//
// together with the verifiers for its characterization, closed-form
// representation, duality, support and exhaustion behaviour.

#include "rieszgreen/active_set.hpp"
#include "rieszgreen/balayage.hpp"
#include "rieszgreen/core.hpp"
#include "rieszgreen/green.hpp"
#include "rieszgreen/riesz.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace rieszgreen {

/// Whether a theorem's hypothesis was checked numerically, approximated, or assumed.
struct Hypothesis {
  std::string name;
  std::string status;  // "checked", "approximated", "assumed", "violated"
  std::string detail;
};

/// The charge theta (on Omega) and the fields it creates. All vectors are over D rows.
struct ExternalField {
  DiscreteMeasure theta;
  double rho = 0.0;
  Eigen::VectorXd field_values;       // f = -U^theta_g
  Eigen::VectorXd dual_field_values;  // f~ = -U^{theta^F_g}_g
  DiscreteMeasure theta_swept;        // theta^F_g
  BalayageResult theta_sweep;
  double mass_bound = 0.0;  // M = theta(D) / rho^(n - alpha)
};

inline ExternalField make_external_field(const GreenSystem& gs, const DiscreteMeasure& theta) {
  check_measure(gs.green(), theta, "make_external_field");
  Eigen::VectorXd global = Eigen::VectorXd::Zero(gs.config().points().size());
  for (Index r = 0; r < theta.size(); ++r) global[gs.global(r)] = theta[r];
  ExternalField fld;
  fld.rho = validate_field_separation(DiscreteMeasure(std::move(global)), gs.config());
  fld.theta = theta;
  fld.field_values = -potential(gs.green(), theta);
  fld.theta_sweep = green_sweep(gs, theta, gs.f_rows());
  fld.theta_swept = fld.theta_sweep.swept;
  fld.dual_field_values = -potential(gs.green(), fld.theta_swept);
  fld.mass_bound = theta.total_mass() / std::pow(fld.rho, gs.config().dim() - gs.config().alpha());
  return fld;
}

struct GaussKkt {
  double lower = 0.0;  // max (c - U_f) over the target set, relative to scale
  double upper = 0.0;  // max (U_f - c) over supp(lambda), relative to scale
  double scale = 1.0;  // max |U_f| over the target set
  double cc_gap = 0.0;  // |QP multiplier - c from the integral formula|, relative

  bool ok(double tol) const { return lower <= tol && upper <= tol; }
};

struct GaussSolution {
  DiscreteMeasure lambda;  // D rows, supported on the target set
  IndexSet target;
  double w_value = 0.0;
  double c_constant = 0.0;  // integral of the weighted potential against lambda
  double multiplier = std::numeric_limits<double>::quiet_NaN();
  GaussKkt kkt;
  Eigen::VectorXd weighted_potential;  // U^lambda_g + f over D rows
  double uniqueness_gap = std::numeric_limits<double>::quiet_NaN();
  double theta_swept_mass = 0.0;
  std::optional<double> green_capacity;
  std::string method;  // "qp" or "formula"
  int iterations = 0;
};

namespace detail {

inline void require_subset_of_f(const GreenSystem& gs, const IndexSet& target, const char* where) {
  if (target.empty()) fail(ErrorKind::validation, std::string(where) + ": target set must be nonempty");
  if (!is_subset(target, gs.f_rows())) fail(ErrorKind::validation, std::string(where) + ": target must lie in F");
}

/// Fills value, constant and residuals of a candidate lambda for the field -field_potential.
inline void evaluate(const GreenSystem& gs, const Eigen::VectorXd& field_potential, GaussSolution& sol) {
  const Eigen::VectorXd ul = potential(gs.green(), sol.lambda);
  sol.weighted_potential = ul - field_potential;
  const Eigen::VectorXd& w = sol.lambda.weights();
  sol.w_value = w.dot(ul) - 2.0 * w.dot(field_potential);
  sol.c_constant = w.dot(sol.weighted_potential);
  double scale = 0.0;
  for (Index i : sol.target) scale = std::max(scale, std::abs(sol.weighted_potential[i]));
  sol.kkt.scale = scale > 0.0 ? scale : 1.0;
  double lower = 0.0, upper = 0.0;
  for (Index i : sol.target) {
    const double d = sol.weighted_potential[i] - sol.c_constant;
    lower = std::max(lower, -d);
    if (w[i] > 0.0) upper = std::max(upper, d);
  }
  sol.kkt.lower = lower / sol.kkt.scale;
  sol.kkt.upper = upper / sol.kkt.scale;
  sol.kkt.cc_gap = std::isnan(sol.multiplier) ? 0.0
                                              : std::abs(sol.multiplier - sol.c_constant) / std::max(1.0, std::abs(sol.c_constant));
}

inline GaussSolution solve_weighted(const GreenSystem& gs, const Eigen::VectorXd& field_potential, IndexSet target,
                                    bool check_uniqueness) {
  target = normalized(std::move(target));
  detail::require_subset_of_f(gs, target, "solve_gauss");
  const Eigen::MatrixXd A = gs.green().block(target);
  const Eigen::VectorXd b = gather(field_potential, target);
  // min x'Ax - 2b'x is min 1/2 x'Ax - b'x up to a factor 2; the multiplier is c.
  const QpResult qp = solve_simplex_qp(A, b, 1.0, gs.options().qp);
  if (!qp.converged) fail(ErrorKind::solver, "solve_gauss: active set did not converge");
  GaussSolution sol;
  sol.target = target;
  sol.lambda = scatter(gs.size(), target, qp.x);
  sol.multiplier = qp.multiplier;
  sol.method = "qp";
  sol.iterations = qp.iterations;
  evaluate(gs, field_potential, sol);

  if (check_uniqueness && target.size() > 1) {
    // Reverse the index order and re-solve; the minimizer is unique.
    const Index k = static_cast<Index>(target.size());
    Eigen::MatrixXd Ar(k, k);
    Eigen::VectorXd br(k);
    for (Index c = 0; c < k; ++c) {
      br[c] = b[k - 1 - c];
      for (Index r = 0; r < k; ++r) Ar(r, c) = A(k - 1 - r, k - 1 - c);
    }
    const QpResult rev = solve_simplex_qp(Ar, br, 1.0, gs.options().qp);
    sol.uniqueness_gap = 0.0;
    for (Index c = 0; c < k; ++c) sol.uniqueness_gap = std::max(sol.uniqueness_gap, std::abs(rev.x[k - 1 - c] - qp.x[c]));
  }
  return sol;
}

inline DiscreteMeasure theta_swept_onto(const GreenSystem& gs, const ExternalField& fld, const IndexSet& target) {
  if (target == gs.f_rows()) return fld.theta_swept;
  return green_sweep(gs, fld.theta, target).swept;
}

}  // namespace detail

/// I_f(mu) = ||mu||_g^2 - 2 <U^theta_g, mu>; mu must be carried by F.
inline double gauss_functional(const GreenSystem& gs, const ExternalField& fld, const DiscreteMeasure& mu) {
  check_measure(gs.green(), mu, "gauss_functional");
  if (!is_subset(mu.support(), gs.f_rows())) fail(ErrorKind::validation, "gauss_functional: measure must be carried by F");
  const Eigen::VectorXd& w = mu.weights();
  return w.dot(gs.green().entries() * w) + 2.0 * w.dot(fld.field_values);
}

/// |I_f(mu) - (||mu - theta^F||^2 - ||theta^F||^2)|, relative to max(1, |I_f(mu)|).
inline double completed_square_gap(const GreenSystem& gs, const ExternalField& fld, const DiscreteMeasure& mu) {
  const double value = gauss_functional(gs, fld, mu);
  const Eigen::VectorXd diff = mu.weights() - fld.theta_swept.weights();
  const double rhs = diff.dot(gs.green().entries() * diff) - mutual_energy(gs.green(), fld.theta_swept, fld.theta_swept);
  return std::abs(value - rhs) / std::max(1.0, std::abs(value));
}

/// Minimizer over probability measures on `target` (F when empty).
inline GaussSolution solve_gauss(const GreenSystem& gs, const ExternalField& fld, IndexSet target = {},
                                 bool check_uniqueness = true) {
  if (target.empty()) target = gs.f_rows();
  GaussSolution sol = detail::solve_weighted(gs, -fld.field_values, std::move(target), check_uniqueness);
  sol.theta_swept_mass = detail::theta_swept_onto(gs, fld, sol.target).total_mass();
  return sol;
}

/// lambda = theta^T + c gamma_T with c = (1 - theta^T(T)) / c_g(T).
inline GaussSolution explicit_solution(const GreenSystem& gs, const ExternalField& fld, IndexSet target = {}) {
  if (target.empty()) target = gs.f_rows();
  target = normalized(std::move(target));
  detail::require_subset_of_f(gs, target, "explicit_solution");
  const DiscreteMeasure swept = detail::theta_swept_onto(gs, fld, target);
  const double m = swept.total_mass();
  if (m > 1.0 + 1e-12)
    fail(ErrorKind::validation, "explicit_solution: swept charge has mass " + std::to_string(m) + " > 1");
  const GreenEquilibrium eq = green_equilibrium(gs, target);
  const double c = (1.0 - m) / eq.capacity;
  GaussSolution sol;
  sol.target = target;
  sol.lambda = swept + eq.gamma.scaled(c);
  sol.method = "formula";
  sol.theta_swept_mass = m;
  sol.green_capacity = eq.capacity;
  detail::evaluate(gs, -fld.field_values, sol);
  sol.multiplier = c;  // the formula's constant, compared against the integral form
  sol.kkt.cc_gap = std::abs(c - sol.c_constant) / std::max(1.0, std::abs(c));
  sol.c_constant = c;
  return sol;
}

/// Scores an arbitrary probability measure on `target` (F when empty) with
/// the same residuals as a solver output; c is taken from the integral form.
inline GaussSolution evaluate_candidate(const GreenSystem& gs, const ExternalField& fld, const DiscreteMeasure& mu,
                                        IndexSet target = {}) {
  if (target.empty()) target = gs.f_rows();
  target = normalized(std::move(target));
  detail::require_subset_of_f(gs, target, "evaluate_candidate");
  check_measure(gs.green(), mu, "evaluate_candidate");
  if (!is_subset(mu.support(), target)) fail(ErrorKind::validation, "evaluate_candidate: measure must be carried by the target");
  GaussSolution sol;
  sol.target = target;
  sol.lambda = mu;
  sol.method = "candidate";
  detail::evaluate(gs, -fld.field_values, sol);
  return sol;
}

struct DualReport {
  std::string status;  // "ok" or "precondition"
  double w_gap = 0.0;
  double lambda_gap = 0.0;  // Green norm of the difference
  double c_gap = 0.0;
};

/// Solves with f and with f~ = -U^{theta^F}_g and compares.
inline DualReport dual_check(const GreenSystem& gs, const ExternalField& fld, IndexSet target = {}) {
  if (target.empty()) target = gs.f_rows();
  target = normalized(std::move(target));
  DualReport rep;
  if (!is_subset(target, gs.f_rows()) || !set_intersection(fld.theta.support(), target).empty()) {
    rep.status = "precondition";
    return rep;
  }
  const GaussSolution a = detail::solve_weighted(gs, -fld.field_values, target, false);
  const GaussSolution b = detail::solve_weighted(gs, -fld.dual_field_values, target, false);
  rep.status = "ok";
  rep.w_gap = std::abs(a.w_value - b.w_value);
  rep.lambda_gap = energy_norm(gs.green(), Eigen::VectorXd(a.lambda.weights() - b.lambda.weights()));
  rep.c_gap = std::abs(a.c_constant - b.c_constant);
  return rep;
}

struct CandidateMargin {
  bool member = false;
  double membership_margin = 0.0;  // min over F of (U^mu_f - c), relative
  double potential_margin = 0.0;   // min over D of (U^mu_g - U^lambda_g), relative
  double norm_margin = 0.0;        // ||mu||_g - ||lambda||_g
};

struct LambdaClassReport {
  std::vector<CandidateMargin> candidates;
  bool minimal_potential = true;
  bool minimal_norm = true;
  double tol = 1e-9;
};

/// Checks that lambda is the pointwise-smallest potential and the smallest
/// norm among the candidates lying in the class {U^mu_f >= c on F}.
inline LambdaClassReport lambda_class_characterizations(const GreenSystem& gs, const ExternalField& fld,
                                                        const GaussSolution& sol,
                                                        const std::vector<DiscreteMeasure>& candidates,
                                                        double tol = 1e-9) {
  LambdaClassReport rep;
  rep.tol = tol;
  const Eigen::VectorXd ul = potential(gs.green(), sol.lambda);
  const double lambda_norm = energy_norm(gs.green(), sol.lambda);
  const double scale = std::max({ul.cwiseAbs().maxCoeff(), sol.kkt.scale, 1e-300});
  for (const auto& mu : candidates) {
    CandidateMargin m;
    const Eigen::VectorXd um = potential(gs.green(), mu);
    double margin = std::numeric_limits<double>::infinity();
    for (Index i : gs.f_rows()) margin = std::min(margin, um[i] + fld.field_values[i] - sol.c_constant);
    m.membership_margin = margin / scale;
    m.member = m.membership_margin >= -tol;
    m.potential_margin = (um - ul).minCoeff() / scale;
    m.norm_margin = energy_norm(gs.green(), mu) - lambda_norm;
    if (m.member) {
      if (m.potential_margin < -tol) rep.minimal_potential = false;
      if (m.norm_margin < -tol * std::max(1.0, lambda_norm)) rep.minimal_norm = false;
    }
    rep.candidates.push_back(m);
  }
  return rep;
}

struct SweepStage {
  Index size = 0;
  double w = 0.0;
  double c = 0.0;
  double theta_swept_mass = 0.0;
  double lambda_mass = 0.0;
  double cauchy_to_reference = 0.0;  // ||lambda_j - lambda_ref||_g
  double probe_gap = 0.0;            // max over probes |U^lambda_j - U^lambda_ref|
  double kkt = 0.0;
};

struct SweepReport {
  std::string direction;  // "increasing" or "decreasing"
  std::vector<SweepStage> stages;
  std::vector<GaussSolution> solutions;
  bool w_monotone = true;
  bool c_hypothesis = false;  // theta^F_g(D) <= 1 for the relevant set
  bool c_monotone = true;
  bool parallelogram_ok = true;
  double worst_parallelogram_slack = 0.0;  // max of ||l_s - l_t||^2 - 2|w_s - w_t|
  bool cauchy_decreasing = true;
  double final_gap = 0.0;  // |w_last - w_reference|
  double tol_w = 1e-10;
  double tol_parallelogram = 1e-9;
};

/// Solves along a nested family (increasing or decreasing) and checks the
/// monotonicity of w and c and the parallelogram Cauchy bound. The reference
/// solution is the last member (the union for increasing families, the
/// intersection for decreasing ones).
inline SweepReport truncation_sweep(const GreenSystem& gs, const ExternalField& fld, std::vector<IndexSet> family,
                                    IndexSet probes = {}) {
  if (family.empty()) fail(ErrorKind::validation, "truncation_sweep: empty family");
  for (auto& s : family) s = normalized(std::move(s));
  bool inc = true, dec = true;
  for (std::size_t j = 1; j < family.size(); ++j) {
    inc = inc && is_subset(family[j - 1], family[j]);
    dec = dec && is_subset(family[j], family[j - 1]);
  }
  if (!inc && !dec) fail(ErrorKind::validation, "truncation_sweep: family is not nested");
  if (probes.empty()) probes = iota_set(gs.size());

  SweepReport rep;
  rep.direction = inc ? "increasing" : "decreasing";
  for (const auto& s : family) rep.solutions.push_back(solve_gauss(gs, fld, s, false));
  const GaussSolution& ref = rep.solutions.back();
  const Eigen::VectorXd u_ref = potential(gs.green(), ref.lambda);

  for (const auto& sol : rep.solutions) {
    SweepStage st;
    st.size = static_cast<Index>(sol.target.size());
    st.w = sol.w_value;
    st.c = sol.c_constant;
    st.theta_swept_mass = sol.theta_swept_mass;
    st.lambda_mass = sol.lambda.total_mass();
    const Eigen::VectorXd diff = sol.lambda.weights() - ref.lambda.weights();
    st.cauchy_to_reference = energy_norm(gs.green(), diff);
    const Eigen::VectorXd u = potential(gs.green(), sol.lambda);
    for (Index p : probes) st.probe_gap = std::max(st.probe_gap, std::abs(u[p] - u_ref[p]));
    st.kkt = std::max(sol.kkt.lower, sol.kkt.upper);
    rep.stages.push_back(st);
  }

  // Mass hypothesis: theta^F(D) <= 1 for the union (increasing) or the first member (decreasing).
  const double hyp_mass = inc ? rep.stages.back().theta_swept_mass : rep.stages.front().theta_swept_mass;
  rep.c_hypothesis = hyp_mass <= 1.0;
  for (std::size_t j = 1; j < rep.stages.size(); ++j) {
    const auto& a = rep.stages[j - 1];
    const auto& b = rep.stages[j];
    const double tw = rep.tol_w * std::max(1.0, std::abs(a.w));
    const double tc = rep.tol_w * std::max(1.0, std::abs(a.c));
    if (inc) {
      if (b.w > a.w + tw) rep.w_monotone = false;
      if (rep.c_hypothesis && b.c > a.c + tc) rep.c_monotone = false;
    } else {
      if (b.w < a.w - tw) rep.w_monotone = false;
      if (rep.c_hypothesis && b.c < a.c - tc) rep.c_monotone = false;
    }
    if (b.cauchy_to_reference > a.cauchy_to_reference + 1e-12) rep.cauchy_decreasing = false;
  }
  for (std::size_t s = 0; s < rep.solutions.size(); ++s)
    for (std::size_t t = s + 1; t < rep.solutions.size(); ++t) {
      const Eigen::VectorXd diff = rep.solutions[s].lambda.weights() - rep.solutions[t].lambda.weights();
      const double lhs = diff.dot(gs.green().entries() * diff);
      const double slack = lhs - 2.0 * std::abs(rep.stages[s].w - rep.stages[t].w);
      rep.worst_parallelogram_slack = std::max(rep.worst_parallelogram_slack, slack);
      if (slack > rep.tol_parallelogram) rep.parallelogram_ok = false;
    }
  rep.final_gap = std::abs(rep.stages.back().w - ref.w_value);
  return rep;
}

inline double distance_from(const GreenSystem& gs, Index d_row, const Eigen::VectorXd& center) {
  return (gs.d_point(d_row) - center).norm();
}

struct ExhaustionStage {
  Index size = 0;
  double truncation_radius = 0.0;
  double theta_swept_mass = 0.0;
  double w = 0.0;
  double c = 0.0;
  double gap_to_swept = 0.0;  // ||lambda_j - theta^{F_j}_g||_g
  double window_mass = 0.0;
  double support_radius = 0.0;
};

struct ExhaustionReport {
  std::vector<ExhaustionStage> stages;
  std::vector<GaussSolution> solutions;
  double theta_mass = 0.0;
  double c_xi_estimate = 0.0;  // integral of U^xi_f against xi with xi ~ last lambda
  std::vector<Hypothesis> hypotheses;
};

/// Trends along increasing truncations of an unbounded F: mass escape from a
/// fixed window when theta(D) < 1, closeness to the swept charge when
/// theta(D) = 1, stabilization of the support when theta(D) > 1.
inline ExhaustionReport exhaustion_mass_probe(const GreenSystem& gs, const ExternalField& fld,
                                              const std::vector<IndexSet>& family, const Eigen::VectorXd& center,
                                              double window_radius) {
  if (family.empty()) fail(ErrorKind::validation, "exhaustion_mass_probe: empty family");
  ExhaustionReport rep;
  rep.theta_mass = fld.theta.total_mass();
  for (const auto& member : family) {
    const IndexSet s = normalized(member);
    GaussSolution sol = solve_gauss(gs, fld, s, false);
    const DiscreteMeasure swept = detail::theta_swept_onto(gs, fld, s);
    ExhaustionStage st;
    st.size = static_cast<Index>(s.size());
    for (Index r : s) st.truncation_radius = std::max(st.truncation_radius, distance_from(gs, r, center));
    st.theta_swept_mass = swept.total_mass();
    st.w = sol.w_value;
    st.c = sol.c_constant;
    st.gap_to_swept = energy_norm(gs.green(), Eigen::VectorXd(sol.lambda.weights() - swept.weights()));
    for (Index r : s) {
      const double dist = distance_from(gs, r, center);
      if (dist <= window_radius) st.window_mass += sol.lambda[r];
      if (sol.lambda[r] > 0.0) st.support_radius = std::max(st.support_radius, dist);
    }
    rep.stages.push_back(st);
    rep.solutions.push_back(std::move(sol));
  }
  rep.c_xi_estimate = rep.stages.back().c;
  if (gs.config().y().empty())
    rep.hypotheses.push_back({"harmonic measure of Y u {inf} vanishes on Omega", "checked", "Y is empty"});
  else
    rep.hypotheses.push_back({"harmonic measure of Y u {inf} vanishes on Omega", "assumed", "Y is sampled"});
  rep.hypotheses.push_back({"F not thin at infinity", "assumed", "finite truncations only"});
  return rep;
}

struct SupportReport {
  IndexSet boundary_rows;  // F rows adjacent to Omega
  double boundary_mass = 0.0;
  double interior_mass = 0.0;
  double boundary_fraction = 0.0;
  double interior_fraction = 0.0;
  Index support_size = 0;
  bool omega_connected = false;
  double adjacency_factor = 1.5;
  std::vector<Hypothesis> hypotheses;
};

namespace detail {

/// Nearest-neighbour distance of every point of the configuration (global indexing).
inline std::vector<double> local_spacing(const PointSet& ps) { return ps.nearest_neighbor_distances(); }

}  // namespace detail

/// Splits the mass of lambda between the discrete boundary of F relative to D
/// (F points with an Omega point within factor x local spacing) and the rest.
inline SupportReport support_descriptor(const GreenSystem& gs, const GaussSolution& sol, double factor = 1.5) {
  const auto& cfg = gs.config();
  const auto& ps = cfg.points();
  const std::vector<double> spacing = detail::local_spacing(ps);
  SupportReport rep;
  rep.adjacency_factor = factor;
  for (Index r : gs.f_rows()) {
    const Index gi = gs.global(r);
    const double radius = factor * spacing[static_cast<std::size_t>(gi)];
    bool edge = false;
    for (Index gj : cfg.omega()) {
      if (ps.distance(gi, gj) <= radius) {
        edge = true;
        break;
      }
    }
    if (edge) rep.boundary_rows.push_back(r);
    (edge ? rep.boundary_mass : rep.interior_mass) += sol.lambda[r];
  }
  const double total = rep.boundary_mass + rep.interior_mass;
  rep.boundary_fraction = total > 0.0 ? rep.boundary_mass / total : 0.0;
  rep.interior_fraction = total > 0.0 ? rep.interior_mass / total : 0.0;
  rep.support_size = static_cast<Index>(sol.lambda.support().size());

  // Connectivity of Omega under the same adjacency rule.
  const IndexSet& om = cfg.omega();
  std::vector<char> seen(om.size(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::size_t a = queue.front();
    queue.pop_front();
    for (std::size_t b = 0; b < om.size(); ++b) {
      if (seen[b]) continue;
      const double reach = factor * std::max(spacing[static_cast<std::size_t>(om[a])], spacing[static_cast<std::size_t>(om[b])]);
      if (ps.distance(om[a], om[b]) <= reach) {
        seen[b] = 1;
        ++reached;
        queue.push_back(b);
      }
    }
  }
  rep.omega_connected = reached == om.size();
  const double m = sol.theta_swept_mass;
  rep.hypotheses.push_back({"(C2) finite capacity and swept mass <= 1", m <= 1.0 ? "checked" : "violated",
                            "theta^F(F) = " + std::to_string(m)});
  if (cfg.alpha() >= 2.0)
    rep.hypotheses.push_back({"Omega connected", rep.omega_connected ? "approximated" : "violated",
                              "graph connectivity under the adjacency radius"});
  return rep;
}

struct DecayRow {
  Index probe = 0;  // D row
  double nearest = 0.0;
  double farthest = 0.0;
  double value = 0.0;  // Riesz potential of theta
  double lower = 0.0;  // theta(D) * farthest^(alpha - n)
  double upper = 0.0;  // theta(D) * nearest^(alpha - n)
  bool within = false;
};

struct DecayTable {
  std::vector<DecayRow> rows;  // sorted by nearest distance
  bool all_within = true;
  bool envelope_decreasing = true;
};

/// Riesz potential of theta at probe points, with distance envelopes.
inline DecayTable field_decay_probe(const GreenSystem& gs, const ExternalField& fld, const IndexSet& probes) {
  const auto& ps = gs.config().points();
  const double alpha = gs.config().alpha();
  const int n = gs.config().dim();
  const IndexSet supp = fld.theta.support();
  const double mass = fld.theta.total_mass();
  DecayTable tab;
  for (Index p : probes) {
    if (std::binary_search(supp.begin(), supp.end(), p)) continue;
    DecayRow row;
    row.probe = p;
    row.nearest = std::numeric_limits<double>::infinity();
    for (Index s : supp) {
      const double d = ps.distance(gs.global(p), gs.global(s));
      row.nearest = std::min(row.nearest, d);
      row.farthest = std::max(row.farthest, d);
      row.value += fld.theta[s] * riesz_kernel(d, alpha, n);
    }
    row.lower = mass * riesz_kernel(row.farthest, alpha, n);
    row.upper = mass * riesz_kernel(row.nearest, alpha, n);
    const double slack = 1e-12 * row.upper;
    row.within = row.value >= row.lower - slack && row.value <= row.upper + slack;
    tab.rows.push_back(row);
  }
  std::sort(tab.rows.begin(), tab.rows.end(), [](const DecayRow& a, const DecayRow& b) {
    return a.nearest < b.nearest || (a.nearest == b.nearest && a.probe < b.probe);
  });
  for (std::size_t k = 0; k < tab.rows.size(); ++k) {
    if (!tab.rows[k].within) tab.all_within = false;
    if (k > 0 && tab.rows[k].upper > tab.rows[k - 1].upper) tab.envelope_decreasing = false;
  }
  return tab;
}

}  // namespace rieszgreen
