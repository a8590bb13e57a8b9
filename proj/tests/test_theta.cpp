#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "isosdp/oracle.hpp"
#include "isosdp/theta.hpp"

using namespace isosdp;

TEST(Theta, ClosedForms) {
  for (std::size_t k = 2; k <= 6; ++k) {
    const auto e = lovasz_theta(empty_graph(k));
    ASSERT_TRUE(e.ok());
    EXPECT_NEAR(e.value, static_cast<double>(k), 1e-6);
    const auto c = lovasz_theta(complete_graph(k));
    ASSERT_TRUE(c.ok());
    EXPECT_NEAR(c.value, 1.0, 1e-6);
  }
  for (std::size_t k : {5u, 7u, 9u}) {
    const double cs = std::cos(std::numbers::pi / static_cast<double>(k));
    EXPECT_NEAR(lovasz_theta(cycle_graph(k)).value, static_cast<double>(k) * cs / (1.0 + cs), 1e-5);
  }
  // Even cycles are perfect: theta = alpha = k/2.
  EXPECT_NEAR(lovasz_theta(cycle_graph(6)).value, 3.0, 1e-5);
}

TEST(Theta, SingleVertex) {
  const auto t = lovasz_theta(Graph(1));
  ASSERT_TRUE(t.ok());
  EXPECT_NEAR(t.value, 1.0, 1e-7);
}

TEST(Prefilter, Examples) {
  const auto p3 = theta_prefilter(build_compatibility(path_graph(3), path_graph(3)));
  EXPECT_NEAR(p3.theta, 3.0, 1e-4);
  EXPECT_EQ(p3.verdict, PrefilterVerdict::PassesNecessaryCondition);
  EXPECT_FALSE(p3.solver_failed);

  const auto k1 = theta_prefilter(build_compatibility(Graph(1), Graph(1)));
  EXPECT_NEAR(k1.theta, 1.0, 1e-6);
  EXPECT_EQ(k1.verdict, PrefilterVerdict::PassesNecessaryCondition);

  const auto gc = build_compatibility(complete_graph(3), empty_graph(3));
  const auto k3e3 = theta_prefilter(gc);
  EXPECT_LT(k3e3.theta, 3.0);
  EXPECT_EQ(k3e3.verdict, PrefilterVerdict::FailsNecessaryCondition);
  EXPECT_GE(k3e3.theta + 1e-4, static_cast<double>(max_clique(gc).size));
}

TEST(Prefilter, SolverFailureIsFlaggedAndPasses) {
  SolverConfig cfg;
  cfg.max_iterations = 1;
  const auto r = theta_prefilter(build_compatibility(complete_graph(3), empty_graph(3)), cfg);
  EXPECT_TRUE(r.solver_failed);
  EXPECT_EQ(r.verdict, PrefilterVerdict::PassesNecessaryCondition);
}

TEST(Prefilter, SandwichAndSoundnessOnRandomPairs) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + t % 4;
    const auto g1 = random_graph(n, 0.5, rng);
    const auto g2 = t % 3 == 0 ? apply_permutation(g1, random_permutation(n, rng)) : random_graph(n, 0.5, rng);
    const auto gc = build_compatibility(g1, g2);
    const auto pf = theta_prefilter(gc);
    ASSERT_FALSE(pf.solver_failed);
    const double omega = static_cast<double>(max_clique(gc).size);
    EXPECT_LE(omega, pf.theta + 1e-4);
    EXPECT_LE(pf.theta, static_cast<double>(n) + 1e-4);
    if (are_isomorphic(g1, g2)) { EXPECT_EQ(pf.verdict, PrefilterVerdict::PassesNecessaryCondition); }
  }
}
