#include <gtest/gtest.h>

#include <sstream>

#include "grg/efgame.hpp"

namespace grg::ef {
namespace {

GeoGraph hand_graph(double length, const std::vector<double>& positions,
                    const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  auto space = SpaceDescriptor::circle(length);
  GeoGraph g;
  g.space = space;
  std::vector<Point> pts;
  for (double p : positions) pts.push_back(space.point({p}));
  g.coords = std::move(pts);
  g.adj.assign(positions.size(), DynBitset(positions.size()));
  for (auto [u, v] : edges) {
    g.adj[u].set(v);
    g.adj[v].set(u);
  }
  return g;
}

GeoGraph sampled_graph(double length, std::size_t n, std::uint64_t s1,
                       std::uint64_t s2) {
  auto sample = sample_iid(SpaceDescriptor::circle(length),
                           SampleConfig{n, s1, 0.05 / double(n)});
  return generate(sample, 0.5, s2);
}

TEST(CheckElementary, EmptyAndIdentity) {
  auto g = sampled_graph(5.3, 120, 1, 2);
  GameContext ctx{GameSide(g), GameSide(g)};
  PartialMap empty;
  for (int n = 0; n <= 4; ++n) EXPECT_TRUE(check_n_elementary(ctx, empty, n).ok);
  PartialMap identity;
  for (std::size_t v = 0; v < 5; ++v) identity.pairs.emplace_back(v, v);
  for (int n = 0; n <= 3; ++n)
    EXPECT_TRUE(check_n_elementary(ctx, identity, n).ok) << n;
}

TEST(CheckElementary, SinglePairAlwaysElementary) {
  auto g1 = sampled_graph(5.3, 100, 3, 4);
  auto g2 = sampled_graph(5.3, 100, 5, 6);
  GameContext ctx{GameSide(g1), GameSide(g2)};
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    PartialMap map;
    map.pairs.emplace_back(rng.below(g1.size()), rng.below(g2.size()));
    for (int n = 0; n <= 4; ++n)
      EXPECT_TRUE(check_n_elementary(ctx, map, n).ok);
  }
}

TEST(CheckElementary, DetectsViolations) {
  // Two vertices at circular order disagreeing with their images.
  auto g1 = hand_graph(5, {0.5, 1.0, 2.0}, {{0, 1}});
  auto g2 = hand_graph(5, {0.5, 2.0, 1.0}, {{0, 1}});
  GameContext ctx{GameSide(g1), GameSide(g2)};
  PartialMap map;
  map.pairs = {{0, 0}, {1, 1}, {2, 2}};
  auto res = check_n_elementary(ctx, map, 0);
  EXPECT_FALSE(res.ok);
  EXPECT_FALSE(res.violation.empty());

  // Edge mismatch.
  auto g3 = hand_graph(5, {0.5, 1.0, 2.0}, {});
  GameContext ctx2{GameSide(g1), GameSide(g3)};
  PartialMap map2;
  map2.pairs = {{0, 0}, {1, 1}};
  EXPECT_FALSE(check_n_elementary(ctx2, map2, 0).ok);
  EXPECT_THROW(check_n_elementary(ctx, map, 12), BudgetExceeded);
}

TEST(Extend, MirroredPairBruteForce) {
  const std::vector<double> pos{0.3, 0.9, 1.4, 2.0, 2.6, 3.1, 3.7, 4.2, 4.6, 4.9};
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  auto space = SpaceDescriptor::circle(5);
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = i + 1; j < pos.size(); ++j) {
      const double d = space.distance(space.point({pos[i]}), space.point({pos[j]}));
      if (d < 1.0 && (i + j) % 2 == 0) edges.push_back({i, j});
    }
  auto g = hand_graph(5, pos, edges);
  GameContext ctx{GameSide(g), GameSide(g)};
  PartialMap map;
  map.pairs = {{0, 0}, {3, 3}, {6, 6}};
  const int level = 2;
  ASSERT_TRUE(check_n_elementary(ctx, map, level).ok);
  const std::size_t fresh = 1;
  // Brute force: candidates passing the full (n-1)-elementarity check.
  std::vector<std::size_t> valid;
  for (std::size_t w = 0; w < g.size(); ++w) {
    if (map.preimage(w)) continue;
    if (check_n_elementary(ctx, map.extended(fresh, w), level - 1).ok)
      valid.push_back(w);
  }
  ASSERT_EQ(valid.size(), 1u);
  EXPECT_EQ(valid[0], 1u);  // the mirror vertex
  auto ext = duplicator_extend(ctx, map, level, fresh, Side::left);
  ASSERT_TRUE(ext.found);
  EXPECT_EQ(ext.partner, 1u);
}

TEST(Extend, AlwaysReverifiedAndSymmetric) {
  auto g1 = sampled_graph(5.3, 500, 7, 8);
  auto g2 = sampled_graph(5.3, 500, 9, 10);
  GameContext ctx{GameSide(g1), GameSide(g2)};
  GameContext swapped{GameSide(g2), GameSide(g1)};
  Rng rng(11);
  int found = 0;
  for (int trial = 0; trial < 20; ++trial) {
    PartialMap map;
    map.pairs.emplace_back(rng.below(g1.size()), rng.below(g2.size()));
    const std::size_t fresh = rng.below(g1.size());
    if (map.image(fresh)) continue;
    auto ext = duplicator_extend(ctx, map, 3, fresh, Side::left);
    auto mirrored = duplicator_extend(swapped, map.transposed(), 3, fresh, Side::right);
    EXPECT_EQ(ext.found, mirrored.found);
    if (!ext.found) continue;
    ++found;
    EXPECT_EQ(ext.partner, mirrored.partner);
    EXPECT_TRUE(check_n_elementary(ctx, ext.map, 2).ok);
  }
  EXPECT_GE(found, 15);
}

TEST(Extend, ErrorsAndMisuse) {
  auto g = sampled_graph(5.3, 200, 13, 14);
  GameContext ctx{GameSide(g), GameSide(g)};
  PartialMap map;
  map.pairs = {{0, 0}};
  EXPECT_THROW(duplicator_extend(ctx, map, 0, 1, Side::left), Error);
  EXPECT_THROW(duplicator_extend(ctx, map, 2, 0, Side::left), Error);
  // Non-elementary precondition.
  auto g2 = sampled_graph(5.3, 200, 15, 16);
  GameContext ctx2{GameSide(g), GameSide(g2)};
  PartialMap bad;
  bad.pairs = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  if (!check_n_elementary(ctx2, bad, 2).ok)
    EXPECT_THROW(duplicator_extend(ctx2, bad, 2, 5, Side::left), NotElementary);
}

TEST(Play, IdentityGraphsAlwaysWin) {
  auto g = sampled_graph(5.3, 400, 17, 18);
  GameContext ctx{GameSide(g), GameSide(g)};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto result = play(ctx, 3, 1, random_spoiler(), seed);
    EXPECT_TRUE(result.win) << result.failure;
    EXPECT_EQ(result.rounds_completed, 3);
    EXPECT_EQ(result.final_level, 1);
    // Level bookkeeping: round k verified at m + rounds - k.
    for (const auto& rec : result.transcript)
      EXPECT_EQ(rec.verified_level, 1 + 3 - rec.round);
  }
}

TEST(Play, IndependentSamplesMostlyWin) {
  auto g1 = sampled_graph(5.3, 600, 19, 20);
  auto g2 = sampled_graph(5.3, 600, 21, 22);
  GameContext ctx{GameSide(g1), GameSide(g2)};
  int wins = 0;
  const int games = 30;
  for (int seed = 0; seed < games; ++seed)
    if (play(ctx, 3, 1, random_spoiler(), seed).win) ++wins;
  EXPECT_GE(wins, int(games * 0.8));
}

TEST(Play, BoundarySpoilerStillMostlyLoses) {
  auto g1 = sampled_graph(5.3, 600, 23, 24);
  auto g2 = sampled_graph(5.3, 600, 25, 26);
  GameContext ctx{GameSide(g1), GameSide(g2)};
  int wins = 0;
  for (int seed = 0; seed < 10; ++seed)
    if (play(ctx, 2, 1, boundary_spoiler(), seed).win) ++wins;
  EXPECT_GE(wins, 6);
}

TEST(Interactive, ScriptedGameMatchesPolicyPlay) {
  auto g = sampled_graph(5.3, 300, 27, 28);
  GameContext ctx{GameSide(g), GameSide(g)};
  // Script the spoiler moves, then replay them through a policy.
  std::istringstream in("1 5\n2 9\n1 20\n");
  std::ostringstream out;
  auto scripted = interactive_play(ctx, 3, 1, in, out);
  EXPECT_TRUE(scripted.win);

  std::vector<std::pair<Side, std::size_t>> moves{
      {Side::left, 5}, {Side::right, 9}, {Side::left, 20}};
  std::size_t at = 0;
  auto policy = [&](const GameContext&, const PartialMap&, int,
                    Rng&) -> std::optional<std::pair<Side, std::size_t>> {
    return moves[at++];
  };
  auto direct = play(ctx, 3, 1, policy, 0);
  ASSERT_EQ(scripted.transcript.size(), direct.transcript.size());
  for (std::size_t i = 0; i < direct.transcript.size(); ++i) {
    EXPECT_EQ(scripted.transcript[i].duplicator_vertex,
              direct.transcript[i].duplicator_vertex);
    EXPECT_EQ(scripted.transcript[i].verified_level,
              direct.transcript[i].verified_level);
  }
}

TEST(Interactive, MalformedInputRepromptsAndQuitAborts) {
  auto g = sampled_graph(5.3, 300, 29, 30);
  GameContext ctx{GameSide(g), GameSide(g)};
  std::istringstream in("bogus\n3 1\n1 999999\n1 5\nquit\n");
  std::ostringstream out;
  auto result = interactive_play(ctx, 3, 1, in, out);
  EXPECT_FALSE(result.win);
  EXPECT_TRUE(result.aborted);
  EXPECT_EQ(result.rounds_completed, 1);  // one completed round before quit
  EXPECT_NE(out.str().find("expected:"), std::string::npos);
}

TEST(RecoveryVariant, OrderOracleSubstitution) {
  auto g1 = sampled_graph(6, 700, 31, 32);
  auto g2 = sampled_graph(6, 700, 33, 34);
  auto b1 = recovery::ball_relation_from_coords(g1);
  auto b2 = recovery::ball_relation_from_coords(g2);
  auto loop1 = recovery::find_orienting_loop(g1, recovery::LoopMode::ground_truth);
  auto loop2 = recovery::find_orienting_loop(g2, recovery::LoopMode::ground_truth);
  recovery::OrderReconstruction rec1(b1, loop1);
  recovery::OrderReconstruction rec2(b2, loop2);
  GameContext ctx{GameSide(g1, &rec1), GameSide(g2, &rec2)};
  int wins = 0;
  for (int seed = 0; seed < 5; ++seed)
    if (play(ctx, 2, 1, random_spoiler(), seed).win) ++wins;
  EXPECT_GE(wins, 3);
}

}  // namespace
}  // namespace grg::ef
