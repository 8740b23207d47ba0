#include "rieszgreen/gauss.hpp"
#include "rieszgreen/geometry.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <random>

using namespace rieszgreen;

namespace {

// Four collinear points at x = 0, 1, -1, 2 (cell radius 1/2); F = {0, 1}.
DomainConfig collinear() {
  Eigen::MatrixXd c(4, 3);
  c << 0, 0, 0, 1, 0, 0, -1, 0, 0, 2, 0, 0;
  return DomainConfig(PointSet(c), iota_set(4), {}, {0, 1}, 2.0);
}

DiscreteMeasure collinear_theta() {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(4);
  w[2] = 0.6;
  w[3] = 0.2;
  return DiscreteMeasure(w);
}

struct Instance {
  DomainConfig cfg;
  DiscreteMeasure theta;  // D rows
};

Instance random_instance(std::mt19937_64& rng, Index f_size, double alpha, double theta_mass) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), r(2.0, 3.0);
  const Eigen::MatrixXd f = geometry::sphere(f_size, 1.0, Eigen::Vector3d::Zero());
  Eigen::MatrixXd charges(2, 3);
  for (Index s = 0; s < 2; ++s) {
    Eigen::Vector3d d(u(rng), u(rng), 0.5 + 0.5 * std::abs(u(rng)));
    charges.row(s) = (r(rng) * d.normalized()).transpose();
  }
  const Eigen::MatrixXd y = geometry::plane(3, 2.0, 0.5, -2.8);
  PointSet ps = PointSet::merge({f, charges, y});
  const Index nd = f_size + 2;
  IndexSet yset;
  for (Index i = nd; i < ps.size(); ++i) yset.push_back(i);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(nd);
  w[f_size] = 0.4 * theta_mass;
  w[f_size + 1] = 0.6 * theta_mass;
  return {DomainConfig(std::move(ps), iota_set(nd), yset, iota_set(f_size), alpha), DiscreteMeasure(w)};
}

}  // namespace

TEST(Gauss, CollinearHandInstance) {
  const DomainConfig cfg = collinear();
  const GreenSystem gs = build_green(cfg);
  const ExternalField fld = make_external_field(gs, collinear_theta());
  const GaussSolution sol = solve_gauss(gs, fld);
  // Independent oracle: lambda = (t, 1 - t), minimize I_f(t) directly.
  const Eigen::MatrixXd k = assemble_riesz(cfg.points(), 2.0).entries();
  const Eigen::VectorXd u = k * collinear_theta().weights();
  const auto energy = [&](double t) {
    const Eigen::Vector2d l(t, 1.0 - t);
    return l.dot(k.topLeftCorner(2, 2) * l) - 2.0 * (u[0] * t + u[1] * (1.0 - t));
  };
  const double t = oracle::argmin_1d(energy, 0.0, 1.0);
  EXPECT_NEAR(t, 0.6, 1e-9);
  EXPECT_NEAR(sol.lambda[0], t, 1e-9);
  EXPECT_NEAR(sol.lambda[1], 1.0 - t, 1e-9);
  EXPECT_NEAR(sol.w_value, energy(t), 1e-10);
  const double c = (k.topLeftCorner(2, 2) * Eigen::Vector2d(t, 1.0 - t))[0] - u[0];
  EXPECT_NEAR(sol.c_constant, c, 1e-9);
  EXPECT_NEAR(sol.c_constant, 0.9, 1e-12);
  const GaussSolution ex = explicit_solution(gs, fld);
  EXPECT_NEAR(ex.c_constant, sol.c_constant, 1e-12);
  EXPECT_LE((ex.lambda.weights() - sol.lambda.weights()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Gauss, MatchesExhaustiveOracleOnSmallF) {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance in = random_instance(rng, 5, trial % 2 ? 2.0 : 1.0, 0.3 + 0.1 * (trial % 8));
    const GreenSystem gs = build_green(in.cfg);
    const ExternalField fld = make_external_field(gs, in.theta);
    const GaussSolution sol = solve_gauss(gs, fld);
    const IndexSet& f = gs.f_rows();
    const Eigen::VectorXd b = gather(potential(gs.green(), in.theta), f);
    const Eigen::VectorXd ref = oracle::brute_force_qp(gs.green().block(f), b, 1.0);
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_NEAR(sol.lambda[f[k]], ref[static_cast<Index>(k)], 1e-9);
  }
}

TEST(Gauss, CharacterizationAndBounds) {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 8; ++trial) {
    const Instance in = random_instance(rng, 120, trial % 2 ? 2.0 : 1.0, 0.2 + 0.3 * (trial % 4));
    const GreenSystem gs = build_green(in.cfg);
    const ExternalField fld = make_external_field(gs, in.theta);
    const GaussSolution sol = solve_gauss(gs, fld);
    EXPECT_NEAR(sol.lambda.total_mass(), 1.0, 1e-12);
    EXPECT_TRUE(sol.kkt.ok(1e-9));
    EXPECT_LE(sol.uniqueness_gap, 1e-10);
    const double swept_energy = mutual_energy(gs.green(), fld.theta_swept, fld.theta_swept);
    EXPECT_GE(sol.w_value, -swept_energy - 1e-10);
    EXPECT_GE(sol.w_value, -2.0 * fld.mass_bound - 1e-10);
    EXPECT_LE(completed_square_gap(gs, fld, sol.lambda), 1e-9);
    // A feasible perturbation never lowers the functional.
    DiscreteMeasure other = sol.lambda.scaled(0.9);
    other.set(gs.f_rows().front(), other[gs.f_rows().front()] + 0.1);
    EXPECT_GE(gauss_functional(gs, fld, other), sol.w_value - 1e-12);
  }
}

TEST(Gauss, ExplicitFormulaOnFullSupports) {
  std::mt19937_64 rng(97);
  int compared = 0;
  for (int trial = 0; trial < 8; ++trial) {
    const Instance in = random_instance(rng, 100, 2.0, 0.5);
    const GreenSystem gs = build_green(in.cfg);
    const ExternalField fld = make_external_field(gs, in.theta);
    const std::size_t nf = gs.f_rows().size();
    if (fld.theta_swept.support().size() != nf || green_equilibrium(gs, gs.f_rows()).gamma.support().size() != nf)
      continue;
    ++compared;
    const GaussSolution sol = solve_gauss(gs, fld);
    const GaussSolution ex = explicit_solution(gs, fld);
    const Eigen::VectorXd diff = sol.lambda.weights() - ex.lambda.weights();
    EXPECT_LE(energy_norm(gs.green(), diff), 1e-6 * energy_norm(gs.green(), sol.lambda));
    EXPECT_NEAR(sol.c_constant, ex.c_constant, 1e-6 * std::max(1.0, std::abs(ex.c_constant)));
  }
  EXPECT_GT(compared, 0);
}

TEST(Gauss, ExplicitFormulaRejectsHeavySweep) {
  std::mt19937_64 rng(101);
  const Instance in = random_instance(rng, 60, 2.0, 3.0);
  const GreenSystem gs = build_green(in.cfg);
  const ExternalField fld = make_external_field(gs, in.theta);
  ASSERT_GT(fld.theta_swept.total_mass(), 1.0);
  EXPECT_THROW(explicit_solution(gs, fld), Error);
}

TEST(Gauss, FieldMustBeSeparatedFromF) {
  const DomainConfig cfg = collinear();
  const GreenSystem gs = build_green(cfg);
  EXPECT_THROW(make_external_field(gs, DiscreteMeasure::dirac(4, 0)), Error);
}

TEST(Truncation, IncreasingFamilyIsMonotone) {
  std::mt19937_64 rng(103);
  const Instance in = random_instance(rng, 160, 2.0, 0.6);
  const GreenSystem gs = build_green(in.cfg);
  const ExternalField fld = make_external_field(gs, in.theta);
  std::vector<IndexSet> family;
  for (double z : {0.5, 0.0, -0.5, -2.0}) {
    IndexSet s;
    for (Index r : gs.f_rows())
      if (gs.d_point(r)[2] >= z) s.push_back(r);
    family.push_back(s);
  }
  const SweepReport rep = truncation_sweep(gs, fld, family);
  EXPECT_EQ(rep.direction, "increasing");
  EXPECT_TRUE(rep.w_monotone);
  EXPECT_TRUE(rep.parallelogram_ok);
  if (rep.c_hypothesis) EXPECT_TRUE(rep.c_monotone);
}
