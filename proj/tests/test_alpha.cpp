#include <gtest/gtest.h>

#include <cmath>

#include "grg/alpha.hpp"

namespace grg {
namespace {

SampleSet circle_sample(double length, std::size_t n, std::uint64_t seed) {
  return sample_iid(SpaceDescriptor::circle(length),
                    SampleConfig{n, seed, 0.05 / double(n)});
}

TEST(AlphaUpper, BruteForceExamples) {
  // Empty-edge graph: neighborhoods are empty.
  auto empty = GeoGraph::from_edges(4, {});
  EXPECT_EQ(alpha_upper(empty, {0, 1, 2}), 0.0);

  auto k3 = GeoGraph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_NEAR(alpha_upper(k3, {0, 1, 2}), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(alpha_upper(k3, {0}), 1.0);

  EXPECT_THROW(alpha_upper(k3, {}), EmptyWitnessSet);
}

TEST(WitnessSet, TrivialSnaps) {
  auto g = generate(circle_sample(5, 40, 3), 0.5, 1);
  // Snap radius covering the whole space always succeeds.
  auto w = build_witness_set(g, 40, 10.0, 7);
  EXPECT_EQ(w.members.size(), 40u);
  std::sort(w.members.begin(), w.members.end());
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(w.members[i], i);  // bijective
  EXPECT_THROW(build_witness_set(g, 41, 10.0, 7), Error);
}

TEST(WitnessSet, SnapRadiusMatters) {
  auto g = generate(circle_sample(5, 30, 5), 0.5, 2);
  // A tiny radius on a sparse sample fails for most seeds.
  int failures = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    try {
      build_witness_set(g, 25, 1e-4, seed);
    } catch (const SnapFailure&) {
      ++failures;
    }
  }
  EXPECT_GT(failures, 10);
}

TEST(WitnessSet, DenseSampleSnapsReliably) {
  auto g = generate(circle_sample(5, 2000, 9), 0.5, 3);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    try {
      build_witness_set(g, 300, 0.05, seed);
      ++ok;
    } catch (const SnapFailure&) {
    }
  }
  EXPECT_GE(ok, 19);
}

TEST(AlphaEstimate, CircleMatchesTarget) {
  auto g = generate(circle_sample(5, 2000, 11), 0.5, 4);
  auto report = alpha_estimate(g, {200, 400}, {0.05}, 21);
  ASSERT_TRUE(report.theoretical.has_value());
  EXPECT_NEAR(*report.theoretical, 0.4, 1e-12);
  EXPECT_NEAR(report.estimate, 0.4, 0.06);
  ASSERT_EQ(report.sets.size(), 2u);
  for (const auto& s : report.sets) {
    EXPECT_TRUE(s.snapped);
    // Coin flips thin the adjacency count to about p * ball count.
    EXPECT_LT(s.adjacency_upper, s.ball_upper);
  }

  // Monotone refinement: more witness sets never increase the estimate.
  auto more = alpha_estimate(g, {200, 400, 600}, {0.05}, 21);
  EXPECT_LE(more.estimate, report.estimate + 1e-12);
}

TEST(AlphaEstimate, UnitBallCoversWholeCircle) {
  auto g = generate(circle_sample(2, 300, 13), 0.5, 5);
  auto report = alpha_estimate(g, {100}, {0.2}, 23);
  EXPECT_NEAR(*report.theoretical, 1.0, 1e-12);
  EXPECT_NEAR(report.estimate, 1.0, 1e-9);
}

// Statistical form of the lower-bound invariant: the ball-capture ratio of
// any witness set stays above the mean unit-ball mass minus slack.
TEST(AlphaEstimate, BallMassLowerBound) {
  auto g = generate(circle_sample(5, 2000, 17), 0.5, 6);
  int violations = 0;
  const int draws = 20;
  for (int i = 0; i < draws; ++i) {
    auto w = build_witness_set(g, 300, 0.05, 100 + i);
    if (ball_upper(g, w.members) < 0.4 - 0.02) ++violations;
  }
  EXPECT_LE(violations, 1);
}

TEST(Sentences, TrivialCases) {
  auto k3 = GeoGraph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_TRUE(alpha_sentence_holds(k3, 3, 3));   // m >= n always holds
  EXPECT_FALSE(alpha_sentence_holds(k3, 1, 2));  // third vertex sees both
  auto empty = GeoGraph::from_edges(5, {});
  EXPECT_TRUE(alpha_sentence_holds(empty, 0, 4));
  EXPECT_NEAR(alpha_from_sentences(empty, 5), 0.0, 1e-12);
  EXPECT_NEAR(alpha_from_sentences(k3, 3), 2.0 / 3.0, 1e-12);
}

TEST(Sentences, BudgetGuard) {
  auto g = generate(circle_sample(5, 60, 19), 0.5, 7);
  EXPECT_THROW(alpha_sentence_holds(g, 3, 30, 1000), BudgetExceeded);
  EXPECT_THROW(alpha_from_sentences(g, 30, 1000), BudgetExceeded);
}

// Exhaustive subset oracle, written independently: min over all non-empty
// subsets U of the max capture ratio.
double subset_oracle(const GeoGraph& g) {
  const std::size_t n = g.size();
  double best = 1.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << n); ++mask) {
    std::size_t size = 0, worst = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (!((mask >> v) & 1)) continue;
      ++size;
    }
    for (std::size_t v = 0; v < n; ++v) {
      std::size_t c = 0;
      for (std::size_t u = 0; u < n; ++u)
        if (((mask >> u) & 1) && g.adjacent(v, u)) ++c;
      worst = std::max(worst, c);
    }
    best = std::min(best, double(worst) / double(size));
  }
  return best;
}

TEST(Sentences, MatchesExhaustiveSubsetOracle) {
  Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + rng.below(9);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (rng.coin(0.4)) edges.push_back({u, v});
    auto g = GeoGraph::from_edges(n, edges);
    EXPECT_NEAR(alpha_from_sentences(g, n), subset_oracle(g), 1e-12);
  }
}

TEST(DeltaSchedule, FollowsMeasureTarget) {
  auto circle = SpaceDescriptor::circle(5);
  const double d = delta_for_measure_target(circle, 0.01);
  EXPECT_NEAR(d, 0.005, 5e-4);  // arc measure moves at rate 2
  const double m1 = circle.ball_measure(1.0);
  EXPECT_LT(std::abs(circle.ball_measure(1.0 + d) - m1), 0.0101);
  auto sphere = SpaceDescriptor::sphere(1);
  const double ds = delta_for_measure_target(sphere, 0.01);
  EXPECT_LT(std::abs(sphere.ball_measure(1.0 + ds) - sphere.ball_measure(1.0)),
            0.0101);
}

}  // namespace
}  // namespace grg
