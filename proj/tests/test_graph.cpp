#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "grg/graph.hpp"
#include "grg/serialize.hpp"

namespace grg {
namespace {

SampleSet circle_sample(double length, std::size_t n, std::uint64_t seed) {
  return sample_iid(SpaceDescriptor::circle(length), SampleConfig{n, seed, 1e-3});
}

TEST(Generate, UnitThresholdHolds) {
  auto sample = circle_sample(5, 300, 21);
  auto g = generate(sample, 0.5, 9);
  for (std::size_t u = 0; u < g.size(); ++u)
    g.row(u).for_each([&](std::size_t v) {
      EXPECT_LT(g.dist(u, v), 1.0);
      EXPECT_NE(u, v);
      EXPECT_TRUE(g.adjacent(v, u));
    });
}

TEST(Generate, Deterministic) {
  auto sample = circle_sample(5, 100, 2);
  auto a = generate(sample, 0.5, 7);
  auto b = generate(sample, 0.5, 7);
  EXPECT_EQ(graph_to_json(a).dump(), graph_to_json(b).dump());
}

TEST(Generate, FarPairNeverAdjacent) {
  auto s = SpaceDescriptor::circle(5);
  SampleSet set{s, {s.point({0}), s.point({1.7})}, SampleConfig{2, 0}};
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    EXPECT_FALSE(generate(set, 0.9, seed).adjacent(0, 1));
}

TEST(Generate, NearPairFrequencyMatchesP) {
  auto s = SpaceDescriptor::circle(5);
  SampleSet set{s, {s.point({0}), s.point({0.3})}, SampleConfig{2, 0}};
  int hits = 0;
  const int runs = 10000;
  for (int seed = 0; seed < runs; ++seed)
    if (generate(set, 0.5, seed).adjacent(0, 1)) ++hits;
  EXPECT_NEAR(double(hits) / runs, 0.5, 0.02);
}

TEST(Generate, SingleVertex) {
  auto s = SpaceDescriptor::circle(5);
  SampleSet set{s, {s.point({1})}, SampleConfig{1, 0}};
  auto g = generate(set, 0.5, 1);
  EXPECT_EQ(g.size(), 1u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(Generate, EdgeCoinsUncorrelated) {
  auto s = SpaceDescriptor::circle(5);
  SampleSet set{s, {s.point({0}), s.point({0.2}), s.point({0.4})},
                SampleConfig{3, 0}};
  const int runs = 1000;
  double e01 = 0, e02 = 0, both = 0;
  for (int seed = 0; seed < runs; ++seed) {
    auto g = generate(set, 0.5, seed);
    const bool a = g.adjacent(0, 1), b = g.adjacent(0, 2);
    e01 += a;
    e02 += b;
    both += a && b;
  }
  const double corr = both / runs - (e01 / runs) * (e02 / runs);
  EXPECT_NEAR(corr, 0.0, 0.05);
}

// Oracle: walks of length 1..k enumerated literally.
std::set<std::size_t> walk_oracle(const GeoGraph& g, std::size_t v, unsigned k) {
  std::set<std::size_t> out;
  std::vector<std::vector<std::size_t>> frontier{{v}};
  for (unsigned len = 1; len <= k; ++len) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& walk : frontier)
      for (std::size_t w = 0; w < g.size(); ++w)
        if (g.adjacent(walk.back(), w)) {
          auto ext = walk;
          ext.push_back(w);
          out.insert(w);
          next.push_back(std::move(ext));
        }
    frontier = std::move(next);
  }
  return out;
}

TEST(Neighbors, PathGraphExamples) {
  auto g = GeoGraph::from_edges(3, {{0, 1}, {1, 2}});
  auto n1 = neighbors_k(g, 0, 1);
  EXPECT_EQ(n1.to_indices(), (std::vector<std::size_t>{1}));
  auto n2 = neighbors_k(g, 0, 2);
  EXPECT_EQ(n2.to_indices(), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Neighbors, IsolatedVertex) {
  auto g = GeoGraph::from_edges(4, {{1, 2}});
  for (unsigned k = 1; k <= 4; ++k) EXPECT_TRUE(neighbors_k(g, 0, k).none());
}

TEST(Neighbors, TriangleWithRepeats) {
  auto g = GeoGraph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  auto n2 = neighbors_k(g, 0, 2);
  EXPECT_EQ(n2.count(), 3u);
  EXPECT_TRUE(n2.test(0));
}

TEST(Neighbors, MatchesWalkOracle) {
  Rng rng(44);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (rng.coin(0.3)) edges.push_back({u, v});
    auto g = GeoGraph::from_edges(n, edges);
    for (unsigned k = 1; k <= 4; ++k)
      for (std::size_t v = 0; v < n; ++v) {
        auto got = neighbors_k(g, v, k);
        std::set<std::size_t> as_set;
        got.for_each([&](std::size_t i) { as_set.insert(i); });
        EXPECT_EQ(as_set, walk_oracle(g, v, k)) << "n=" << n << " v=" << v << " k=" << k;
      }
  }
}

TEST(Neighbors, MonotoneLayersAndCache) {
  auto sample = circle_sample(5, 60, 3);
  auto g = generate(sample, 0.5, 4);
  NeighborhoodCache cache(g);
  for (std::size_t v = 0; v < g.size(); ++v)
    for (unsigned k = 1; k < 4; ++k) {
      EXPECT_TRUE(cache.layer(v, k).is_subset_of(cache.layer(v, k + 1)));
      EXPECT_TRUE(cache.layer(v, k) == neighbors_k(g, v, k));
    }
  EXPECT_THROW(neighbors_k(g, g.size(), 1), IndexOutOfRange);
}

TEST(Strip, RemovesGeometryKeepsEdges) {
  auto sample = circle_sample(5, 80, 5);
  auto g = generate(sample, 0.5, 6);
  auto bare = strip_coordinates(g);
  EXPECT_FALSE(bare.has_coords());
  EXPECT_FALSE(bare.space.has_value());
  ASSERT_EQ(bare.size(), g.size());
  for (std::size_t u = 0; u < g.size(); ++u)
    EXPECT_TRUE(bare.row(u) == g.row(u));
  EXPECT_LT(graph_to_json(bare).dump().size(), graph_to_json(g).dump().size());
}

TEST(GraphIo, LosslessRoundTrip) {
  auto sample = circle_sample(5.3, 70, 8);
  auto g = generate(sample, 0.4, 11);
  auto back = graph_from_json(graph_to_json(g));
  EXPECT_EQ(graph_to_json(back).dump(), graph_to_json(g).dump());
  EXPECT_TRUE(back.space.has_value());
  EXPECT_EQ(back.edge_count(), g.edge_count());
}

TEST(GraphIo, RejectsCorruptFiles) {
  auto g = GeoGraph::from_edges(3, {{0, 1}});
  auto j = graph_to_json(g);
  j["edges"].push_back(Json::array({2, 2}));
  EXPECT_THROW(graph_from_json(j), Error);
}

}  // namespace
}  // namespace grg
