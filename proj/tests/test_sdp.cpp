#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "certify.hpp"
#include "isosdp/clique_sdp.hpp"
#include "isosdp/sdp.hpp"
#include "isosdp/theta.hpp"

using namespace isosdp;
using isosdp::testing::certify;

namespace {

double odd_cycle_theta(double k) {
  const double c = std::cos(std::numbers::pi / k);
  return k * c / (1.0 + c);
}

std::vector<SdpProblem> golden_problems() {
  return {build_theta_sdp(empty_graph(3)), build_theta_sdp(complete_graph(3)), build_theta_sdp(cycle_graph(5)),
          build_clique_sdp(build_compatibility(path_graph(3), path_graph(3))),
          build_clique_sdp(build_compatibility(complete_graph(3), empty_graph(3))),
          build_clique_sdp(build_compatibility(cycle_graph(4), path_graph(4)))};
}

}  // namespace

TEST(Solve, ThetaExamples) {
  const auto e3 = solve(build_theta_sdp(empty_graph(3)));
  ASSERT_EQ(e3.status, SolveStatus::Optimal);
  EXPECT_NEAR(e3.primal_objective, 3.0, 1e-6);
  const auto k3 = solve(build_theta_sdp(complete_graph(3)));
  ASSERT_EQ(k3.status, SolveStatus::Optimal);
  EXPECT_NEAR(k3.primal_objective, 1.0, 1e-6);
  const auto c5 = solve(build_theta_sdp(cycle_graph(5)));
  ASSERT_EQ(c5.status, SolveStatus::Optimal);
  EXPECT_NEAR(c5.primal_objective, odd_cycle_theta(5), 1e-5);
  EXPECT_NEAR(c5.primal_objective, std::sqrt(5.0), 1e-5);
}

TEST(Solve, CliqueRelaxationOnP3) {
  const auto sol = solve(build_clique_sdp(build_compatibility(path_graph(3), path_graph(3))));
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.primal_objective, 9.0, 1e-4);
}

TEST(Solve, GoldenSolutionsCertify) {
  for (const auto& p : golden_problems()) {
    const auto s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal);
    const auto c = certify(p, s);
    EXPECT_TRUE(c.pass) << c.failure;
  }
}

TEST(Solve, GapTrendIsMonotoneOverFiveIterations) {
  for (const auto& p : golden_problems()) {
    const auto s = solve(p);
    const auto& h = s.gap_history;
    ASSERT_FALSE(h.empty());
    for (std::size_t k = 0; k + 5 < h.size(); ++k) EXPECT_LT(h[k + 5], h[k]) << "iteration " << k;
  }
}

TEST(Solve, Deterministic) {
  const auto p = build_clique_sdp(build_compatibility(cycle_graph(5), path_graph(5)));
  const auto a = solve(p);
  const auto b = solve(p);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.primal_objective, b.primal_objective);
  EXPECT_EQ(a.x, b.x);
}

TEST(Solve, ObjectiveScaling) {
  for (const auto& p : golden_problems()) {
    auto scaled = p;
    Matrix c = p.objective.dense.dense();
    for (double& v : c.data()) v *= 10.0;
    scaled.objective.dense = SymMatrix(c);
    for (double& v : scaled.objective.diag) v *= 10.0;
    const auto a = solve(p);
    const auto b = solve(scaled);
    ASSERT_EQ(b.status, SolveStatus::Optimal);
    EXPECT_NEAR(b.primal_objective, 10.0 * a.primal_objective, 1e-6 * std::abs(10.0 * a.primal_objective));
  }
}

TEST(Solve, IterationCapReportsMaxIterations) {
  SolverConfig cfg;
  cfg.max_iterations = 2;
  const auto s = solve(build_theta_sdp(cycle_graph(5)), cfg);
  EXPECT_EQ(s.status, SolveStatus::MaxIterations);
  EXPECT_EQ(s.iterations, 2u);
  EXPECT_GT(s.relative_gap, cfg.gap_tol);
}

TEST(Solve, TighterToleranceStillConverges) {
  SolverConfig cfg;
  cfg.gap_tol = cfg.feas_tol = 1e-9;
  const auto p = build_theta_sdp(cycle_graph(7));
  const auto s = solve(p, cfg);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.primal_objective, odd_cycle_theta(7), 1e-7);
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  c.step_fraction = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.gap_tol = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.max_iterations = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(ValidateProblem, RejectsMalformedProblems) {
  SdpProblem empty(2, 0);
  EXPECT_THROW(validate_problem(empty), std::invalid_argument);

  SdpProblem dup(2, 0);
  SdpConstraint a;
  a.dense = {{0, 1, 0.5}};
  dup.constraints = {a, a};
  EXPECT_THROW(validate_problem(dup), std::invalid_argument);

  SdpProblem range(2, 0);
  SdpConstraint r;
  r.dense = {{0, 2, 1.0}};
  range.constraints = {r};
  EXPECT_THROW(validate_problem(range), std::invalid_argument);

  SdpProblem ok(2, 0);
  SdpConstraint t;
  t.dense = {{0, 0, 1.0}, {1, 1, 1.0}};
  t.rhs = 1.0;
  ok.constraints = {t};
  EXPECT_NO_THROW(validate_problem(ok));
}

TEST(DefaultInitialization, TraceScaling) {
  const std::size_t n = 4;
  const auto gc = build_compatibility(path_graph(n), cycle_graph(n));
  const auto init = default_initialization(build_clique_sdp(gc));
  EXPECT_DOUBLE_EQ(init.x.dense(0, 0), 1.0 / static_cast<double>(n));
  EXPECT_DOUBLE_EQ(init.x.dense.trace(), static_cast<double>(n));
  EXPECT_GT(min_eigenvalue(init.x.dense), 0.0);
  EXPECT_GT(min_eigenvalue(init.s.dense), 0.0);
  for (double y : init.y) EXPECT_EQ(y, 0.0);

  const auto th = default_initialization(build_theta_sdp(cycle_graph(5)));
  EXPECT_DOUBLE_EQ(th.x.dense(2, 2), 0.2);

  SdpProblem free(2, 0);
  SdpConstraint c;
  c.dense = {{0, 1, 0.5}};
  free.constraints = {c};
  EXPECT_DOUBLE_EQ(default_initialization(free).x.dense(0, 0), 1.0);
}

TEST(Solve, DiagonalBlockOnlyLinearProgram) {
  // max x0 + 2 x1  s.t.  x0 + x1 = 1, x >= 0  ->  2.
  SdpProblem p(0, 2);
  p.objective.diag = {1.0, 2.0};
  SdpConstraint c;
  c.diag = {{0, 1.0}, {1, 1.0}};
  c.rhs = 1.0;
  p.constraints = {c};
  const auto s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.primal_objective, 2.0, 1e-6);
}

TEST(Solve, CapsDropGivesScaledTheta) {
  // Without the unit caps the relaxation is n * theta(complement(G_c)).
  std::mt19937_64 rng(31);
  for (int t = 0; t < 4; ++t) {
    const std::size_t n = 3 + t % 2;
    const auto gc = build_compatibility(random_graph(n, 0.5, rng), random_graph(n, 0.5, rng));
    const auto relaxed = solve(build_clique_sdp(gc, false));
    const auto th = lovasz_theta(complement(gc.graph()));
    ASSERT_EQ(relaxed.status, SolveStatus::Optimal);
    ASSERT_TRUE(th.ok());
    const double nn = static_cast<double>(n);
    EXPECT_NEAR(relaxed.primal_objective, nn * th.value, 1e-4 * nn * nn);
  }
}
