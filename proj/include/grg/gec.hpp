#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "grg/errors.hpp"
#include "grg/graph.hpp"
#include "grg/rng.hpp"

namespace grg {

/// One existential-closure probe: look for a vertex within epsilon of s that
/// is adjacent to all of A and none of B, both of which sit inside the open
/// unit ball around s.
struct GecProbe {
  std::size_t s = 0;
  std::vector<std::size_t> a;
  std::vector<std::size_t> b;
  double epsilon = 0;
};

namespace detail {

inline void check_probe_sets(const GecProbe& probe) {
  if (probe.epsilon <= 0) throw InvalidProbe("epsilon must be positive");
  for (std::size_t x : probe.a)
    for (std::size_t y : probe.b)
      if (x == y) throw InvalidProbe("pattern sets intersect");
}

inline bool matches_pattern(const GeoGraph& g, const GecProbe& probe,
                            std::size_t v) {
  for (std::size_t x : probe.a)
    if (v == x || !g.adjacent(v, x)) return false;
  for (std::size_t y : probe.b)
    if (v == y || g.adjacent(v, y)) return false;
  return true;
}

}  // namespace detail

/// Coordinate mode: candidates are vertices with d(s, v) < epsilon, scanned
/// in order of distance from s. Returns the first vertex outside A and B
/// whose adjacency pattern matches, if any.
inline std::optional<std::size_t> find_witness(const GeoGraph& g,
                                               const GecProbe& probe) {
  if (!g.has_coords())
    throw NotApplicable(
        "find_witness needs coordinates; in pure-adjacency mode pass an "
        "explicit candidate set");
  detail::check_probe_sets(probe);
  for (std::size_t x : probe.a)
    if (g.dist(probe.s, x) >= 1.0)
      throw InvalidProbe("pattern vertex outside the unit ball around s");
  for (std::size_t y : probe.b)
    if (g.dist(probe.s, y) >= 1.0)
      throw InvalidProbe("pattern vertex outside the unit ball around s");

  std::vector<std::pair<double, std::size_t>> near;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const double d = g.dist(probe.s, v);
    if (d < probe.epsilon) near.emplace_back(d, v);
  }
  std::sort(near.begin(), near.end());
  for (auto [d, v] : near)
    if (detail::matches_pattern(g, probe, v)) return v;
  return std::nullopt;
}

/// Pure-adjacency mode: the epsilon test is metric information, so the
/// caller supplies the candidate set; pattern membership in the unit ball
/// is checked against the supplied ball relation.
inline std::optional<std::size_t> find_witness(
    const GeoGraph& g, const GecProbe& probe,
    const std::vector<std::size_t>& candidates,
    const std::vector<DynBitset>& ball_relation) {
  detail::check_probe_sets(probe);
  for (std::size_t x : probe.a)
    if (x != probe.s && !ball_relation[probe.s].test(x))
      throw InvalidProbe("pattern vertex outside the recovered unit ball");
  for (std::size_t y : probe.b)
    if (y != probe.s && !ball_relation[probe.s].test(y))
      throw InvalidProbe("pattern vertex outside the recovered unit ball");
  for (std::size_t v : candidates)
    if (detail::matches_pattern(g, probe, v)) return v;
  return std::nullopt;
}

struct GecScoreConfig {
  std::size_t trials = 100;
  std::size_t max_pattern = 4;
  std::size_t min_pattern = 0;
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  /// When false every drawn pattern vertex goes to A (no forbidden side).
  bool negatives = true;
};

struct GecTrialRecord {
  GecProbe probe;
  std::optional<std::size_t> witness;
};

/// Runs seeded random probes and reports each one through `sink`.
/// Patterns are drawn from the sample inside the unit ball around a random
/// vertex; draws that cannot form a valid probe are rejected and redrawn.
template <class Sink>
inline double gec_trials(const GeoGraph& g, const GecScoreConfig& cfg, Sink&& sink) {
  if (!g.has_coords()) throw NotApplicable("gec score needs coordinates");
  if (g.size() == 0) throw EmptySample("gec score over an empty graph");
  if (cfg.min_pattern > cfg.max_pattern)
    throw Error("min_pattern must not exceed max_pattern");
  std::size_t success = 0;
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    Rng rng = substream(cfg.seed, stream::kGecTrial, trial);
    GecProbe probe;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000)
        throw Error("could not form a valid probe; pattern too large for graph");
      probe.s = rng.below(g.size());
      std::vector<std::size_t> ball;
      for (std::size_t v = 0; v < g.size(); ++v)
        if (v != probe.s && g.dist(probe.s, v) < 1.0) ball.push_back(v);
      const std::size_t span = cfg.max_pattern - cfg.min_pattern + 1;
      const std::size_t want = cfg.min_pattern + rng.below(span);
      if (ball.size() < want) continue;
      // Partial Fisher-Yates draw of `want` distinct pattern vertices.
      for (std::size_t i = 0; i < want; ++i)
        std::swap(ball[i], ball[i + rng.below(ball.size() - i)]);
      probe.a.clear();
      probe.b.clear();
      for (std::size_t i = 0; i < want; ++i) {
        if (cfg.negatives && rng.coin(0.5)) probe.b.push_back(ball[i]);
        else probe.a.push_back(ball[i]);
      }
      probe.epsilon = cfg.epsilon;
      break;
    }
    auto witness = find_witness(g, probe);
    if (witness) ++success;
    sink(GecTrialRecord{probe, witness});
  }
  return cfg.trials ? double(success) / double(cfg.trials) : 0.0;
}

/// Fraction of random probes for which a witness exists.
inline double gec_score(const GeoGraph& g, const GecScoreConfig& cfg) {
  return gec_trials(g, cfg, [](const GecTrialRecord&) {});
}

}  // namespace grg
