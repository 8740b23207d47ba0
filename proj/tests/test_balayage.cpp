#include "rieszgreen/balayage.hpp"
#include "rieszgreen/geometry.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <random>

using namespace rieszgreen;

namespace {

struct SweepCase {
  PointSet points;
  IndexSet q;
  DiscreteMeasure xi;
};

// A small sphere shell q with random exterior sources.
SweepCase make_case(std::mt19937_64& rng, Index shell, Index sources) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), r(1.5, 3.0), m(0.1, 1.0);
  std::vector<Eigen::MatrixXd> parts{geometry::sphere(shell, 1.0, Eigen::Vector3d::Zero())};
  Eigen::MatrixXd src(sources, 3);
  for (Index s = 0; s < sources; ++s) {
    Eigen::Vector3d d(u(rng), u(rng), u(rng));
    src.row(s) = (r(rng) * d.normalized()).transpose();
  }
  parts.push_back(src);
  PointSet ps = PointSet::merge(parts);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(shell + sources);
  for (Index s = 0; s < sources; ++s) w[shell + s] = m(rng);
  return {std::move(ps), iota_set(shell), DiscreteMeasure(w)};
}

}  // namespace

TEST(Sweep, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const double alpha = trial % 2 ? 2.0 : 1.0;
    SweepCase c = make_case(rng, 6, 2);
    const KernelMatrix k = assemble_riesz(c.points, alpha);
    const BalayageResult r = sweep(k, c.xi, c.q);
    const Eigen::VectorXd b = gather(potential(k, c.xi), c.q);
    const Eigen::VectorXd ref = oracle::brute_force_qp(k.block(c.q), b, std::nullopt);
    for (std::size_t t = 0; t < c.q.size(); ++t) EXPECT_NEAR(r.swept[c.q[t]], ref[static_cast<Index>(t)], 1e-10);
  }
}

TEST(Sweep, CharacterizingInequalities) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = 1.0 + 0.5 * (trial % 3);
    SweepCase c = make_case(rng, 60, 1 + trial % 4);
    const KernelMatrix k = assemble_riesz(c.points, alpha);
    const BalayageResult r = sweep(k, c.xi, c.q);
    EXPECT_LE(r.kkt.equality, 1e-9);
    EXPECT_LE(r.kkt.inequality, 1e-9);
    EXPECT_TRUE(is_subset(r.swept.support(), c.q));
    EXPECT_LE(r.mass_out, r.mass_in + 1e-10);
    EXPECT_LE(energy_norm(k, r.swept), energy_norm(k, c.xi) + 1e-10);
  }
}

TEST(Sweep, IdempotentAndIdentityOnTarget) {
  std::mt19937_64 rng(41);
  SweepCase c = make_case(rng, 50, 3);
  const KernelMatrix k = assemble_riesz(c.points, 1.5);
  const BalayageResult once = sweep(k, c.xi, c.q);
  const BalayageResult twice = sweep(k, once.swept, c.q);
  EXPECT_EQ(twice.algorithm, "identity");
  EXPECT_LE((twice.swept.weights() - once.swept.weights()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Sweep, DirectAndConeAgree) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    SweepCase c = make_case(rng, 40, 2);
    const KernelMatrix k = assemble_riesz(c.points, 2.0);
    const BalayageResult a = sweep(k, c.xi, c.q, SweepAlgorithm::cone_projection);
    const BalayageResult b = sweep(k, c.xi, c.q, SweepAlgorithm::direct_with_fallback);
    EXPECT_LE((a.swept.weights() - b.swept.weights()).cwiseAbs().maxCoeff(), 1e-9 * a.mass_in);
  }
}

TEST(Sweep, CompositionThroughNestedTargets) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    SweepCase c = make_case(rng, 80, 2);
    const KernelMatrix k = assemble_riesz(c.points, 2.0);
    IndexSet cap;
    for (Index i : c.q)
      if (c.points.point(i)[2] > 0.0) cap.push_back(i);
    const BalayageResult direct = sweep(k, c.xi, cap);
    const BalayageResult staged = sweep(k, sweep(k, c.xi, c.q).swept, cap);
    EXPECT_LE((direct.swept.weights() - staged.swept.weights()).cwiseAbs().maxCoeff(), 1e-8 * c.xi.total_mass());
  }
}

TEST(Sweep, SuperpositionOfDiracColumns) {
  std::mt19937_64 rng(53);
  SweepCase c = make_case(rng, 60, 3);
  const KernelMatrix k = assemble_riesz(c.points, 2.0);
  const SweepMatrix m = dirac_sweep_matrix(k, c.xi.support(), c.q);
  const BalayageResult r = sweep(k, c.xi, c.q);
  EXPECT_LE((m.superpose(c.xi, k.size()) - r.swept.weights()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(m.column_masses().maxCoeff(), 1.0 + 1e-10);
}

TEST(HarmonicMeasure, InUnitInterval) {
  std::mt19937_64 rng(59);
  SweepCase c = make_case(rng, 60, 1);
  const KernelMatrix k = assemble_riesz(c.points, 2.0);
  const double h = harmonic_measure_at_infinity(k, 60, c.q);
  EXPECT_GE(h, -1e-12);
  EXPECT_LE(h, 1.0 + 1e-12);
}
