#include "rieszgreen/geometry.hpp"
#include "rieszgreen/riesz.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rieszgreen;

namespace {

PointSet random_cloud(std::mt19937_64& rng, Index n, int dim) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Eigen::MatrixXd c(n, dim);
  for (Index i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k) c(i, k) = u(rng);
  return PointSet(c);
}

DiscreteMeasure random_measure(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd w(n);
  for (Index i = 0; i < n; ++i) w[i] = u(rng) < 0.4 ? 0.0 : u(rng);
  return DiscreteMeasure(w);
}

}  // namespace

TEST(RieszKernel, TwoPointCapacityHandValue) {
  Eigen::MatrixXd c(2, 3);
  c << 0, 0, 0, 1, 0, 0;
  const PointSet ps(c, {0.25, 0.25});
  const KernelMatrix k = assemble_riesz(ps, 2.0);
  EXPECT_DOUBLE_EQ(k(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(k(0, 1), 1.0);
  const CapacityResult cap = capacity(k, {0, 1});
  EXPECT_NEAR(cap.capacity, 0.4, 1e-12);
  EXPECT_NEAR(cap.minimizer[0], 0.5, 1e-12);
  const EquilibriumResult eq = equilibrium_measure(k, {0, 1});
  EXPECT_NEAR(eq.gamma[0], 0.2, 1e-12);
  EXPECT_NEAR(eq.gamma[1], 0.2, 1e-12);
  EXPECT_NEAR(eq.mass, cap.capacity, 1e-12);
}

TEST(RieszKernel, SymmetricPositiveDefinite) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 2 + trial % 2;
    const double alpha = (trial % 3 == 0) ? 1.0 : (dim == 2 ? 1.5 : 2.0);
    const PointSet ps = random_cloud(rng, 30, dim);
    const KernelMatrix k = assemble_riesz(ps, alpha);
    EXPECT_EQ(k.entries(), k.entries().transpose());
    EXPECT_GT(k.min_pivot(), 0.0);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k.entries()).eigenvalues().minCoeff(), 0.0);
  }
}

TEST(RieszKernel, RejectsInvalidAlpha) {
  std::mt19937_64 rng(4);
  const PointSet ps = random_cloud(rng, 5, 3);
  EXPECT_THROW(assemble_riesz(ps, 2.5), Error);
  EXPECT_THROW(assemble_riesz(ps, 0.0), Error);
  EXPECT_THROW(assemble_riesz(ps, 2.0, 1.5), Error);
  const PointSet flat = random_cloud(rng, 5, 2);
  EXPECT_THROW(assemble_riesz(flat, 2.0), Error);
}

TEST(RieszKernel, HomogeneousUnderDilation) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const PointSet ps = random_cloud(rng, 15, 3);
    const double s = 0.5 + trial * 0.3, alpha = 1.0 + 0.1 * trial;
    const PointSet scaled(Eigen::MatrixXd(s * ps.coords()));
    const KernelMatrix k = assemble_riesz(ps, alpha), ks = assemble_riesz(scaled, alpha);
    const double factor = std::pow(s, alpha - 3.0);
    EXPECT_LE((ks.entries() - factor * k.entries()).cwiseAbs().maxCoeff(), 1e-12 * k.entries().cwiseAbs().maxCoeff());
    EXPECT_NEAR(capacity(ks, iota_set(15)).capacity, capacity(k, iota_set(15)).capacity / factor,
                1e-9 * capacity(ks, iota_set(15)).capacity);
  }
}

TEST(RieszEnergy, CauchySchwarz) {
  std::mt19937_64 rng(8);
  const PointSet ps = random_cloud(rng, 25, 3);
  const KernelMatrix k = assemble_riesz(ps, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const DiscreteMeasure mu = random_measure(rng, 25), nu = random_measure(rng, 25);
    EXPECT_LE(mutual_energy(k, mu, nu), energy_norm(k, mu) * energy_norm(k, nu) * (1 + 1e-12));
  }
}

TEST(RieszCapacity, MonotoneUnderInclusion) {
  std::mt19937_64 rng(10);
  const PointSet ps = random_cloud(rng, 40, 3);
  const KernelMatrix k = assemble_riesz(ps, 1.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    IndexSet small, big;
    for (Index i = 0; i < 40; ++i) {
      const double r = u(rng);
      if (r < 0.3) small.push_back(i);
      if (r < 0.6) big.push_back(i);
    }
    if (small.empty()) continue;
    EXPECT_LE(capacity(k, small).capacity, capacity(k, big).capacity * (1 + 1e-10));
  }
}

TEST(RieszCapacity, EquilibriumMassEqualsCapacityWhenPotentialIsOne) {
  const Eigen::MatrixXd pts = geometry::sphere(120, 1.0, Eigen::Vector3d::Zero());
  const KernelMatrix k = assemble_riesz(PointSet(pts), 2.0);
  const EquilibriumResult eq = equilibrium_measure(k, iota_set(120));
  ASSERT_EQ(eq.gamma.support().size(), 120u);
  EXPECT_NEAR(eq.mass, capacity(k, iota_set(120)).capacity, 1e-9 * eq.mass);
  EXPECT_NEAR(eq.min_potential_on_set, 1.0, 1e-10);
}
