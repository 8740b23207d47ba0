#include "rieszgreen/active_set.hpp"
#include "rieszgreen/core.hpp"

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <random>

using namespace rieszgreen;

namespace {

Eigen::MatrixXd random_spd(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd b(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) b(i, j) = g(rng);
  return b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

}  // namespace

TEST(IndexSets, OperationsAgreeWithMembership) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick(0, 29);
  for (int trial = 0; trial < 200; ++trial) {
    IndexSet a, b;
    for (int k = 0; k < 12; ++k) a.push_back(pick(rng));
    for (int k = 0; k < 12; ++k) b.push_back(pick(rng));
    a = normalized(a);
    b = normalized(b);
    const auto in = [](const IndexSet& s, Index i) { return std::binary_search(s.begin(), s.end(), i); };
    const IndexSet u = set_union(a, b), d = set_difference(a, b), x = set_intersection(a, b);
    for (Index i = 0; i < 30; ++i) {
      EXPECT_EQ(in(u, i), in(a, i) || in(b, i));
      EXPECT_EQ(in(d, i), in(a, i) && !in(b, i));
      EXPECT_EQ(in(x, i), in(a, i) && in(b, i));
    }
    EXPECT_TRUE(is_subset(x, a));
    EXPECT_TRUE(is_subset(a, u));
  }
}

TEST(PointSet, DefaultRadiusIsHalfNearestNeighbor) {
  Eigen::MatrixXd c(3, 2);
  c << 0, 0, 1, 0, 3, 0;
  const PointSet ps(c);
  EXPECT_DOUBLE_EQ(ps.cell_radius(0), 0.5);
  EXPECT_DOUBLE_EQ(ps.cell_radius(1), 0.5);
  EXPECT_DOUBLE_EQ(ps.cell_radius(2), 1.0);
  EXPECT_DOUBLE_EQ(ps.min_pairwise_distance(), 1.0);
}

TEST(PointSet, RejectsBadInput) {
  Eigen::MatrixXd dup(2, 3);
  dup << 0, 0, 0, 0, 0, 0;
  EXPECT_THROW(PointSet{dup}, Error);
  Eigen::MatrixXd line(2, 1);
  line << 0, 1;
  EXPECT_THROW(PointSet{line}, Error);
  Eigen::MatrixXd ok(2, 3);
  ok << 0, 0, 0, 1, 0, 0;
  EXPECT_THROW(PointSet(ok, std::vector<double>{0.5, -1.0}), Error);
}

TEST(DiscreteMeasure, RejectsNegativeWeights) {
  EXPECT_THROW(DiscreteMeasure(Eigen::Vector3d(1.0, -1e-300, 0.0)), Error);
  DiscreteMeasure m(3);
  EXPECT_THROW(m.set(0, -1.0), Error);
  EXPECT_TRUE(m.is_zero());
}

TEST(DiscreteMeasure, RestrictIsIdempotentAndAdditive) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd w(20);
    for (Index i = 0; i < 20; ++i) w[i] = u(rng) < 0.3 ? 0.0 : u(rng);
    const DiscreteMeasure mu(w);
    IndexSet a, b;
    for (Index i = 0; i < 20; ++i) (u(rng) < 0.5 ? a : b).push_back(i);
    const DiscreteMeasure ra = restrict(mu, a);
    EXPECT_EQ(restrict(ra, a).weights(), ra.weights());
    EXPECT_NEAR((ra + restrict(mu, b)).total_mass(), mu.total_mass(), 1e-12);
    EXPECT_NEAR(ra.total_mass(), mu.mass_on(a), 1e-14 * mu.total_mass());
  }
}

TEST(ProjectSimplex, MatchesDefinition) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::VectorXd v = random_vector(rng, 7);
    const Eigen::VectorXd p = detail::project_simplex(v, 2.0);
    EXPECT_NEAR(p.sum(), 2.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
    // Variational inequality: (v - p).(q - p) <= 0 for simplex vertices q.
    for (Index k = 0; k < 7; ++k) {
      Eigen::VectorXd q = Eigen::VectorXd::Zero(7);
      q[k] = 2.0;
      EXPECT_LE((v - p).dot(q - p), 1e-12);
    }
  }
}

TEST(ActiveSet, ConeQpMatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    const Index n = 2 + trial % 6;
    const Eigen::MatrixXd a = random_spd(rng, n);
    const Eigen::VectorXd b = random_vector(rng, n);
    const QpResult r = solve_nonneg_qp(a, b);
    ASSERT_TRUE(r.kkt_ok(1e-9));
    const Eigen::VectorXd ref = oracle::brute_force_qp(a, b, std::nullopt);
    EXPECT_LE((r.x - ref).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
}

TEST(ActiveSet, SimplexQpMatchesBruteForce) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 150; ++trial) {
    const Index n = 2 + trial % 6;
    const Eigen::MatrixXd a = random_spd(rng, n);
    const Eigen::VectorXd b = random_vector(rng, n);
    const double mass = 0.5 + trial % 3;
    const QpResult r = solve_simplex_qp(a, b, mass);
    ASSERT_TRUE(r.kkt_ok(1e-9));
    EXPECT_NEAR(r.x.sum(), mass, 1e-12);
    const Eigen::VectorXd ref = oracle::brute_force_qp(a, b, mass);
    EXPECT_LE((r.x - ref).cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
}

TEST(ActiveSet, WarmStartDoesNotChangeTheSolution) {
  std::mt19937_64 rng(23);
  const Index n = 80;
  const Eigen::MatrixXd a = random_spd(rng, n);
  const Eigen::VectorXd b = random_vector(rng, n);
  QpOptions cold;
  cold.warm_start_iterations = 0;
  const QpResult warm = solve_simplex_qp(a, b, 1.0);
  const QpResult plain = solve_simplex_qp(a, b, 1.0, cold);
  EXPECT_LE((warm.x - plain.x).cwiseAbs().maxCoeff(), 1e-10);
}
