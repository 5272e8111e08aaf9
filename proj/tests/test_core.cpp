#include <gtest/gtest.h>

#include <set>

#include "grg/bitset.hpp"
#include "grg/rng.hpp"

namespace grg {
namespace {

TEST(Bitset, SetTestCount) {
  DynBitset b(130);
  EXPECT_EQ(b.count(), 0u);
  b.set(0);
  b.set(64);
  b.set(129);
  EXPECT_TRUE(b.test(0));
  EXPECT_TRUE(b.test(64));
  EXPECT_TRUE(b.test(129));
  EXPECT_FALSE(b.test(1));
  EXPECT_EQ(b.count(), 3u);
  b.reset(64);
  EXPECT_EQ(b.count(), 2u);
}

TEST(Bitset, Algebra) {
  DynBitset a(100), b(100);
  for (std::size_t i = 0; i < 100; i += 2) a.set(i);
  for (std::size_t i = 0; i < 100; i += 3) b.set(i);
  EXPECT_EQ(a.count_and(b), (a & b).count());
  EXPECT_EQ((a | b).count(), a.count() + b.count() - a.count_and(b));
  EXPECT_TRUE((a & b).is_subset_of(a));
  EXPECT_TRUE((a & b).is_subset_of(b));
  EXPECT_FALSE(a.is_subset_of(b));
  DynBitset c = a;
  c.subtract(b);
  EXPECT_FALSE(c.intersects(b));
  EXPECT_EQ(c.count() + a.count_and(b), a.count());
}

TEST(Bitset, Iteration) {
  DynBitset b(200);
  std::set<std::size_t> want{3, 63, 64, 65, 127, 128, 199};
  for (auto i : want) b.set(i);
  std::set<std::size_t> got;
  b.for_each([&](std::size_t i) { got.insert(i); });
  EXPECT_EQ(got, want);
  EXPECT_EQ(b.find_first(), 3u);
  EXPECT_EQ(b.find_next(4), 63u);
  EXPECT_EQ(b.find_next(199), 199u);
  EXPECT_EQ(b.find_next(200), 200u);
}

TEST(Bitset, SetAllRespectsSize) {
  DynBitset b(70);
  b.set_all();
  EXPECT_EQ(b.count(), 70u);
}

TEST(Rng, DeterministicStreams) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 100; ++i) differs |= (a2.next() != c.next());
  EXPECT_TRUE(differs);
}

TEST(Rng, UnitRange) {
  Rng r(7);
  for (int i = 0; i < 10000; ++i) {
    double u = r.unit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, BelowIsUnbiasedEnough) {
  Rng r(11);
  std::vector<int> counts(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) counts[r.below(10)]++;
  for (int c : counts) EXPECT_NEAR(c, draws / 10, 600);
}

TEST(Rng, SubstreamsIndependentOfEachOther) {
  // Re-drawing from one substream must not disturb another.
  Rng s1 = substream(5, stream::kSamplePoint, 0);
  Rng s2 = substream(5, stream::kSamplePoint, 1);
  const double first_of_s2 = substream(5, stream::kSamplePoint, 1).unit();
  s1.unit();
  s1.unit();
  EXPECT_EQ(s2.unit(), first_of_s2);
}

TEST(Rng, EdgeCoinOrderIndependent) {
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (std::size_t u = 0; u < 5; ++u)
      for (std::size_t v = u + 1; v < 5; ++v)
        EXPECT_EQ(edge_coin(seed, u, v, 0.37), edge_coin(seed, v, u, 0.37));
}

}  // namespace
}  // namespace grg
