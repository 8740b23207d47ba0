#include "rieszgreen/geometry.hpp"
#include "rieszgreen/green.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <random>

using namespace rieszgreen;

namespace {

DomainConfig small_domain(std::mt19937_64& rng, double alpha) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd d(6, 3);
  for (Index i = 0; i < 6; ++i) d.row(i) << u(rng), u(rng), 1.5 + 0.5 * u(rng);
  const Eigen::MatrixXd y = geometry::plane(3, 1.0, 1.0, 0.0).topRows(5);
  PointSet ps = PointSet::merge({d, y});
  return DomainConfig(std::move(ps), iota_set(6), {6, 7, 8, 9, 10}, {0, 1, 2}, alpha);
}

}  // namespace

TEST(GreenKernel, MatchesSweptRieszOracle) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 15; ++trial) {
    const double alpha = trial % 2 ? 2.0 : 1.5;
    const DomainConfig cfg = small_domain(rng, alpha);
    const GreenSystem gs = build_green(cfg);
    const KernelMatrix k = assemble_riesz(cfg.points(), alpha);
    const IndexSet& d = cfg.d();
    const IndexSet& y = cfg.y();
    const Eigen::MatrixXd kyy = k.block(y), kyd = k.block(y, d), kdd = k.block(d);
    Eigen::MatrixXd g = kdd;
    for (std::size_t c = 0; c < d.size(); ++c) {
      const Eigen::VectorXd w = oracle::brute_force_qp(kyy, kyd.col(static_cast<Index>(c)), std::nullopt);
      g.col(static_cast<Index>(c)) -= kyd.transpose() * w;
    }
    const Eigen::MatrixXd sym = 0.5 * (g + g.transpose());
    EXPECT_LE((gs.green().entries() - sym).cwiseAbs().maxCoeff(), 1e-10 * kdd.maxCoeff());
  }
}

TEST(GreenKernel, BoundsAndSymmetry) {
  std::mt19937_64 rng(67);
  const DomainConfig cfg = small_domain(rng, 2.0);
  const GreenSystem gs = build_green(cfg);
  EXPECT_EQ(gs.green().entries(), gs.green().entries().transpose());
  EXPECT_GE(gs.min_entry(), -1e-10);
  EXPECT_LE(gs.max_excess_over_riesz(), 1e-10);
  EXPECT_GT(gs.green().min_pivot(), 0.0);
}

TEST(GreenKernel, EmptyWallGivesRiesz) {
  Eigen::MatrixXd c(4, 3);
  c << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  const DomainConfig cfg(PointSet(c), iota_set(4), {}, {0, 1}, 2.0);
  const GreenSystem gs = build_green(cfg);
  EXPECT_EQ(gs.green().entries(), assemble_riesz(cfg.points(), 2.0).entries());
}

TEST(GreenPotential, CrossPathResidualSmall) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const DomainConfig cfg = small_domain(rng, 2.0);
    const GreenSystem gs = build_green(cfg);
    Eigen::VectorXd w(gs.size());
    for (Index i = 0; i < w.size(); ++i) w[i] = u(rng);
    const GreenPotential gp = green_potential(gs, DiscreteMeasure(w));
    EXPECT_LE(gp.cross_path_residual, 1e-8);
  }
}

TEST(GreenEquilibrium, FrostmanBound) {
  std::mt19937_64 rng(73);
  const DomainConfig cfg = small_domain(rng, 2.0);
  const GreenSystem gs = build_green(cfg);
  const GreenEquilibrium eq = green_equilibrium(gs, gs.f_rows());
  EXPECT_GT(eq.capacity, 0.0);
  EXPECT_GE(eq.equilibrium.min_potential_on_set, 1.0 - 1e-9);
  EXPECT_NEAR(eq.equilibrium.mass, eq.capacity, 1e-6 * eq.capacity);
}

TEST(GreenSweep, BothRoutesAgree) {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    const DomainConfig cfg = small_domain(rng, 1.5);
    const GreenSystem gs = build_green(cfg);
    DiscreteMeasure mu(gs.size());
    for (Index r : gs.omega_rows()) mu.set(r, 0.3);
    const BalayageResult r = green_sweep(gs, mu, gs.f_rows());
    EXPECT_FALSE(r.warning);
    EXPECT_LE(r.path_discrepancy, 1e-8);
    EXPECT_LE(r.mass_out, r.mass_in + 1e-10);
  }
}
