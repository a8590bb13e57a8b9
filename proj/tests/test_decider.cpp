#include <algorithm>
#include <cstdlib>
#include <random>

#include <gtest/gtest.h>

#include "figure2.hpp"
#include "isosdp/decider.hpp"

using namespace isosdp;

namespace {

DeciderConfig no_prefilter() {
  DeciderConfig c;
  c.prefilter = false;
  return c;
}

}  // namespace

TEST(Decide, P3P3IsCertified) {
  const auto r = decide(path_graph(3), path_graph(3), no_prefilter());
  EXPECT_EQ(r.verdict, Verdict::IsomorphicCertified);
  ASSERT_TRUE(r.value);
  EXPECT_NEAR(*r.value, 9.0, 1e-4);
  EXPECT_EQ(r.tau, 7.5);
  ASSERT_TRUE(r.mapping);
  EXPECT_TRUE(verify_mapping(path_graph(3), path_graph(3), *r.mapping));
  const auto isos = enumerate_isomorphisms(path_graph(3), path_graph(3));
  EXPECT_TRUE(std::any_of(isos.begin(), isos.end(),
                          [&](const Permutation& q) { return q.mapping() == r.mapping->mapping(); }));
  ASSERT_TRUE(r.oracle_isomorphic);
  EXPECT_TRUE(*r.oracle_isomorphic);
  EXPECT_FALSE(r.gap_bound_exceeded);
}

TEST(Decide, K3VersusEmpty) {
  const auto with = decide(complete_graph(3), empty_graph(3));
  EXPECT_EQ(with.verdict, Verdict::NonIsomorphicCertified);
  EXPECT_EQ(with.prefilter, PrefilterVerdict::FailsNecessaryCondition);
  const auto without = decide(complete_graph(3), empty_graph(3), no_prefilter());
  EXPECT_EQ(without.verdict, Verdict::NonIsomorphicCertified);
  ASSERT_TRUE(without.value);
  EXPECT_LT(*without.value, without.tau);
}

TEST(Decide, OrderMismatchShortCircuits) {
  const auto r = decide(path_graph(3), path_graph(4));
  EXPECT_EQ(r.verdict, Verdict::NonIsomorphicCertified);
  EXPECT_EQ(r.reason, "order mismatch");
  EXPECT_FALSE(r.value);
}

TEST(Decide, SixCycleVersusTwoTriangles) {
  const auto g1 = cycle_graph(6), g2 = disjoint_union(cycle_graph(3), cycle_graph(3));
  const auto r = decide(g1, g2, no_prefilter());
  ASSERT_TRUE(r.value);
  ASSERT_TRUE(r.oracle_isomorphic);
  EXPECT_FALSE(*r.oracle_isomorphic);
  EXPECT_NE(r.verdict, Verdict::IsomorphicCertified);
  EXPECT_EQ(r.gap_bound_exceeded, *r.value > 30.0 + kGapBoundMargin);
}

TEST(Decide, SolverFailureIsInconclusive) {
  DeciderConfig c = no_prefilter();
  c.solver.max_iterations = 3;
  const auto r = decide(path_graph(4), path_graph(4), c);
  EXPECT_EQ(r.verdict, Verdict::Inconclusive);
  ASSERT_TRUE(r.solver);
  EXPECT_EQ(r.solver->status, SolveStatus::MaxIterations);
}

TEST(Decide, ExtractionOffGivesClaimed) {
  DeciderConfig c = no_prefilter();
  c.extraction = false;
  const auto r = decide(path_graph(3), path_graph(3), c);
  EXPECT_EQ(r.verdict, Verdict::IsomorphicClaimed);
  EXPECT_FALSE(r.mapping);
}

TEST(Decide, ShortcutsAreOptIn) {
  DeciderConfig c;
  c.shortcuts = true;
  const auto r = decide(path_graph(4), cycle_graph(4), c);
  EXPECT_EQ(r.verdict, Verdict::NonIsomorphicCertified);
  EXPECT_EQ(r.reason, "degree sequence mismatch");
  const auto d = decide(path_graph(4), cycle_graph(4), no_prefilter());
  EXPECT_TRUE(d.value);
}

TEST(Decide, TauValidation) {
  DeciderConfig c;
  c.tau = 6.0;  // n(n-1) for n = 3
  EXPECT_THROW(decide(path_graph(3), path_graph(3), c), std::invalid_argument);
  c.tau = 9.0;
  EXPECT_THROW(decide(path_graph(3), path_graph(3), c), std::invalid_argument);
  c.tau = 8.5;
  EXPECT_EQ(decide(path_graph(3), path_graph(3), c).tau, 8.5);
}

TEST(Decide, OrderGuard) {
  EXPECT_THROW(decide(path_graph(13), path_graph(13)), std::length_error);
}

TEST(Decide, SoundOnRandomIsomorphicPairs) {
  std::mt19937_64 rng(404);
  for (int t = 0; t < 12; ++t) {
    const std::size_t n = 3 + t % 3;
    const auto g = random_graph(n, 0.5, rng);
    const auto h = apply_permutation(g, random_permutation(n, rng));
    const auto r = decide(g, h);
    EXPECT_NE(r.verdict, Verdict::NonIsomorphicCertified);
    ASSERT_TRUE(r.value);
    EXPECT_GE(*r.value, static_cast<double>(n * n) - 1e-4);
    if (r.verdict == Verdict::IsomorphicCertified) { EXPECT_TRUE(verify_mapping(g, h, *r.mapping)); }
  }
}

TEST(VerifyMapping, Examples) {
  std::mt19937_64 rng(1);
  const auto g = random_graph(6, 0.5, rng);
  const auto p = random_permutation(6, rng);
  EXPECT_TRUE(verify_mapping(g, apply_permutation(g, p), p));
  EXPECT_TRUE(verify_mapping(path_graph(3), path_graph(3), Permutation({2, 1, 0})));
  EXPECT_FALSE(verify_mapping(path_graph(3), path_graph(3), Permutation({1, 0, 2})));
  for (const auto& q : {Permutation({0, 1, 2}), Permutation({1, 2, 0}), Permutation({2, 0, 1})})
    EXPECT_FALSE(verify_mapping(complete_graph(3), path_graph(3), q));
  EXPECT_THROW(verify_mapping(path_graph(3), path_graph(3), Permutation::identity(2)), std::invalid_argument);
}

TEST(ExtractMapping, RankOneRecoversClique) {
  const auto g = cycle_graph(5);
  const auto h = apply_permutation(g, Permutation({3, 0, 4, 1, 2}));
  const auto gc = build_compatibility(g, h);
  for (const auto& c : enumerate_n_cliques(gc).cliques) {
    const auto m = extract_mapping(build_rank1_solution(gc, c), gc);
    ASSERT_TRUE(m);
    for (auto v : c) EXPECT_EQ((*m)(gc.partition_of(v)), gc.image_of(v));
  }
}

TEST(ExtractMapping, ReferenceBlendYieldsValidMapping) {
  const auto g1 = isosdp::testing::figure_g1(), g2 = isosdp::testing::figure_g2();
  const auto gc = build_compatibility(g1, g2);
  const auto m = extract_mapping(isosdp::testing::figure_x(), gc);
  ASSERT_TRUE(m);
  EXPECT_TRUE(verify_mapping(g1, g2, *m));
}

TEST(ExtractMapping, MultiCliqueBlends) {
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto gc = build_compatibility(complete_graph(n), complete_graph(n));
    const auto x = build_multiclique_solution(gc, enumerate_n_cliques(gc)).x;
    const auto m = extract_mapping(x, gc);
    ASSERT_TRUE(m) << "n=" << n;
    EXPECT_TRUE(verify_mapping(complete_graph(n), complete_graph(n), *m));
  }
}

TEST(ExtractMapping, NonIsomorphicPairNeverVerifies) {
  const auto g1 = cycle_graph(5), g2 = path_graph(5);
  DeciderConfig c = no_prefilter();
  const auto r = decide(g1, g2, c);
  EXPECT_NE(r.verdict, Verdict::IsomorphicCertified);
  if (r.mapping) { EXPECT_FALSE(verify_mapping(g1, g2, *r.mapping)); }
}

TEST(ExtractMapping, ZeroMatrixGivesNothing) {
  const auto gc = build_compatibility(path_graph(3), path_graph(3));
  EXPECT_FALSE(extract_mapping(SymMatrix(9), gc));
  EXPECT_THROW(extract_mapping(SymMatrix(4), gc), std::invalid_argument);
}

TEST(Verdict, StringRoundTrip) {
  for (auto v : {Verdict::NonIsomorphicCertified, Verdict::IsomorphicCertified, Verdict::IsomorphicClaimed,
                 Verdict::Inconclusive})
    EXPECT_EQ(verdict_from_string(to_string(v)), v);
  EXPECT_THROW(verdict_from_string("maybe"), std::invalid_argument);
}

TEST(MaxOrder, EnvironmentOverride) {
  ::setenv("ISOSDP_MAX_N", "20", 1);
  EXPECT_EQ(max_supported_order(), 20u);
  ::setenv("ISOSDP_MAX_N", "junk", 1);
  EXPECT_EQ(max_supported_order(), kDefaultMaxOrder);
  ::unsetenv("ISOSDP_MAX_N");
  EXPECT_EQ(max_supported_order(), kDefaultMaxOrder);
}
