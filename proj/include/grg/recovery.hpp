#pragma once

#include <algorithm>
#include <cstdint>
#include <climits>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "grg/bitset.hpp"
#include "grg/errors.hpp"
#include "grg/graph.hpp"
#include "grg/rng.hpp"

namespace grg::recovery {

/// Recovered "same unit ball" relation over vertex indices. Stored rows are
/// symmetric and irreflexive; formula evaluation treats the relation as
/// reflexive (distance zero is inside the ball), via within().
struct UnitBallRelation {
  std::vector<DynBitset> rows;

  std::size_t size() const { return rows.size(); }
  bool within(std::size_t x, std::size_t y) const {
    return x == y || rows[x].test(y);
  }
};

/// Ground-truth ball relation from coordinates (d < 1), for oracles and for
/// seeding searches when geometry is available.
inline UnitBallRelation ball_relation_from_coords(const GeoGraph& g) {
  if (!g.has_coords()) throw NotApplicable("graph has no coordinates");
  UnitBallRelation b;
  b.rows.assign(g.size(), DynBitset(g.size()));
  for (std::size_t u = 0; u < g.size(); ++u)
    for (std::size_t v = u + 1; v < g.size(); ++v)
      if (g.dist(u, v) < 1.0) {
        b.rows[u].set(v);
        b.rows[v].set(u);
      }
  return b;
}

/// Unit-ball recovery from pure adjacency: x is in the ball around v when x
/// lies in N_2(v) and so does every neighbor of x; symmetrized by
/// conjunction of the two directions. Valid regime is circles of length
/// above 4 (caller's assumption).
inline UnitBallRelation recover_unit_ball(const GeoGraph& g) {
  const std::size_t n = g.size();
  if (n == 0) throw EmptySample("cannot recover over an empty graph");
  std::vector<DynBitset> n2;
  n2.reserve(n);
  for (std::size_t v = 0; v < n; ++v) n2.push_back(neighbors_k(g, v, 2));
  std::vector<DynBitset> dir(n, DynBitset(n));
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t x = 0; x < n; ++x) {
      if (x == v) continue;
      if (n2[v].test(x) && g.row(x).is_subset_of(n2[v])) dir[v].set(x);
    }
  UnitBallRelation b;
  b.rows.assign(n, DynBitset(n));
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t x = v + 1; x < n; ++x)
      if (dir[v].test(x) && dir[x].test(v)) {
        b.rows[v].set(x);
        b.rows[x].set(v);
      }
  return b;
}

/// Interval between ball-adjacent a and b:
///   { x : forall v ((B(v,a) & B(v,b)) -> (x = v | B(x,v))) }.
/// With no common stored-B neighbor the forall is vacuous and the whole
/// domain comes back.
inline DynBitset recover_interval(const UnitBallRelation& b, std::size_t a,
                                  std::size_t bb) {
  const std::size_t n = b.size();
  if (a == bb || !b.rows[a].test(bb))
    throw NotBallAdjacent("interval endpoints must be distinct and ball-adjacent");
  DynBitset common = b.rows[a] & b.rows[bb];
  DynBitset out(n);
  if (common.none()) {
    out.set_all();
    return out;
  }
  // x must be within distance 1 of every common neighbor, in particular of
  // the first one; scan only that ball.
  const std::size_t v0 = common.find_first();
  auto qualifies = [&](std::size_t x) {
    bool ok = true;
    common.for_each([&](std::size_t v) { ok &= b.within(x, v); });
    return ok;
  };
  if (qualifies(v0)) out.set(v0);
  b.rows[v0].for_each([&](std::size_t x) {
    if (qualifies(x)) out.set(x);
  });
  return out;
}

/// Cyclic list of vertices a_0 .. a_{m-1} (closure back to a_0 implicit)
/// whose consecutive intervals cover the circle once.
struct OrientingLoop {
  std::vector<std::size_t> vertices;

  std::size_t arc_count() const { return vertices.size(); }
  std::size_t at(std::size_t i) const { return vertices[i % vertices.size()]; }
};

struct LoopSearchConfig {
  std::size_t start_attempts = 12;
  std::size_t backtrack_budget = 400;
  /// Consecutive recovered intervals may share this many points beyond the
  /// common endpoint before a step is rejected.
  std::size_t join_slack = SIZE_MAX;  // SIZE_MAX = scaled default
  /// Vertices allowed to be covered != exactly once by the candidate loop.
  std::size_t defect_budget = SIZE_MAX;

  /// Consecutive intervals of a genuine forward step share the joint plus
  /// a handful of boundary-fuzz points; a reversed step shares most of an
  /// arc (~n/L points), far above this slack.
  std::size_t effective_join_slack(std::size_t n) const {
    return join_slack != SIZE_MAX ? join_slack : 8 + n / 100;
  }
  /// A clean loop leaves a few defects per boundary; a mis-oriented or
  /// degenerate loop double- or zero-covers whole arcs (~n/arcs vertices).
  std::size_t effective_defect_budget(std::size_t n) const {
    return defect_budget != SIZE_MAX ? defect_budget
                                     : std::max<std::size_t>(3, n / 12);
  }
};

enum class LoopMode { ground_truth, adjacency_search };

namespace detail {

inline std::size_t interval_coverage_defects(const UnitBallRelation& b,
                                             const std::vector<std::size_t>& loop) {
  const std::size_t n = b.size();
  std::vector<std::uint8_t> cover(n, 0);
  std::vector<std::uint8_t> is_loop(n, 0);
  for (std::size_t v : loop) is_loop[v] = 1;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    DynBitset arc = recover_interval(b, loop[i], loop[(i + 1) % loop.size()]);
    arc.for_each([&](std::size_t x) {
      if (!is_loop[x] && cover[x] < 250) ++cover[x];
    });
  }
  std::size_t defects = 0;
  for (std::size_t x = 0; x < n; ++x)
    if (!is_loop[x] && cover[x] != 1) ++defects;
  return defects;
}

}  // namespace detail

/// Number of non-loop vertices not covered exactly once by the loop's
/// recovered intervals. Zero is the ideal partition; finite samples leave a
/// small boundary population.
inline std::size_t partition_defects(const UnitBallRelation& b,
                                     const OrientingLoop& loop) {
  return detail::interval_coverage_defects(b, loop.vertices);
}

inline OrientingLoop find_orienting_loop_ground_truth(const GeoGraph& g,
                                                      std::uint64_t seed,
                                                      std::size_t attempts) {
  if (!g.has_coords() || !g.space || g.space->kind() != SpaceKind::circle)
    throw NotApplicable("ground-truth loop search needs circle coordinates");
  const double length = g.space->circle_length();
  if (length <= 3)
    throw LoopNotFound("orienting loops need circle length above 3");
  const std::size_t arcs = std::size_t(std::floor(length)) + 1;
  const auto& space = *g.space;
  Rng rng = substream(seed, stream::kWitness);
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    const std::size_t start = rng.below(g.size());
    std::vector<std::size_t> loop;
    std::vector<char> used(g.size(), 0);
    bool ok = true;
    for (std::size_t i = 0; i < arcs && ok; ++i) {
      const Point target =
          space.shift(g.coord(start), double(i) * length / double(arcs));
      std::size_t best = g.size();
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v < g.size(); ++v) {
        if (used[v]) continue;
        const double d = space.distance(target, g.coord(v));
        if (d < best_d) {
          best_d = d;
          best = v;
        }
      }
      if (best == g.size()) { ok = false; break; }
      used[best] = 1;
      loop.push_back(best);
    }
    if (!ok) continue;
    // Steps in (0,1), forward winding exactly one turn, orientation cyclic.
    double winding = 0;
    for (std::size_t i = 0; i < arcs && ok; ++i) {
      const double fwd = space.reduce(g.coord(loop[(i + 1) % arcs]).x[0] -
                                      g.coord(loop[i]).x[0]);
      const double step = space.distance(g.coord(loop[i]), g.coord(loop[(i + 1) % arcs]));
      if (!(step > 0 && step < 1)) ok = false;
      winding += fwd;
    }
    if (!ok || std::abs(winding - length) > 1e-6) continue;
    for (std::size_t i = 0; i < arcs && ok; ++i)
      if (!space.circular_order(g.coord(loop[i]), g.coord(loop[(i + 1) % arcs]),
                                g.coord(loop[(i + 2) % arcs])))
        ok = false;
    if (ok) return OrientingLoop{loop};
  }
  throw LoopNotFound("no orienting loop found from sampled starts");
}

/// Greedy maximal-advance search over the recovered structure: extend by
/// the ball-adjacent vertex spanning the largest recovered interval while
/// consecutive intervals stay essentially disjoint, closing as soon as the
/// closure passes the partition check. Backtracks on failure.
inline OrientingLoop find_orienting_loop_adjacency(const UnitBallRelation& b,
                                                   std::uint64_t seed,
                                                   const LoopSearchConfig& cfg) {
  const std::size_t n = b.size();
  const std::size_t join_slack = cfg.effective_join_slack(n);
  std::map<std::pair<std::size_t, std::size_t>, DynBitset> interval_cache;
  auto interval = [&](std::size_t u, std::size_t v) -> const DynBitset& {
    auto key = std::make_pair(u, v);
    auto it = interval_cache.find(key);
    if (it == interval_cache.end())
      it = interval_cache.emplace(key, recover_interval(b, u, v)).first;
    return it->second;
  };
  auto unidirectional = [&](std::size_t u, std::size_t v, std::size_t w) {
    const DynBitset& one = interval(u, v);
    const DynBitset& two = interval(v, w);
    if (!one.test(v) || !two.test(v)) return false;
    return one.count_and(two) <= 1 + join_slack;
  };

  Rng rng = substream(seed, stream::kWitness, 1);
  std::size_t budget = cfg.backtrack_budget;
  for (std::size_t attempt = 0; attempt < cfg.start_attempts; ++attempt) {
    const std::size_t start = rng.below(n);
    if (b.rows[start].none()) continue;
    std::vector<std::size_t> loop{start};
    std::vector<char> used(n, 0);
    used[start] = 1;
    // Candidate stacks per depth, largest interval first.
    std::vector<std::vector<std::size_t>> stack;
    auto candidates = [&](std::size_t from) {
      std::vector<std::pair<std::size_t, std::size_t>> scored;
      b.rows[from].for_each([&](std::size_t c) {
        if (used[c]) return;
        scored.emplace_back(interval(from, c).count(), c);
      });
      // Ascending by interval size: pop_back() yields the maximal advance.
      std::sort(scored.begin(), scored.end());
      std::vector<std::size_t> out;
      out.reserve(scored.size());
      for (auto& [sz, c] : scored) out.push_back(c);
      return out;
    };
    stack.push_back(candidates(start));
    while (!stack.empty()) {
      if (budget == 0) break;
      // Try closing first once the loop is long enough.
      if (loop.size() >= 4) {
        const std::size_t last = loop.back();
        const std::size_t prev = loop[loop.size() - 2];
        if (b.rows[last].test(loop[0]) && unidirectional(prev, last, loop[0]) &&
            unidirectional(last, loop[0], loop[1]) &&
            detail::interval_coverage_defects(b, loop) <=
                cfg.effective_defect_budget(n))
          return OrientingLoop{loop};
      }
      auto& cands = stack.back();
      bool extended = false;
      while (!cands.empty()) {
        const std::size_t next = cands.back();
        cands.pop_back();
        const std::size_t last = loop.back();
        if (loop.size() >= 2 && !unidirectional(loop[loop.size() - 2], last, next))
          continue;
        loop.push_back(next);
        used[next] = 1;
        stack.push_back(candidates(next));
        extended = true;
        --budget;
        break;
      }
      if (!extended) {
        used[loop.back()] = 0;
        loop.pop_back();
        stack.pop_back();
        if (budget) --budget;
        if (loop.empty()) break;
      }
    }
  }
  throw LoopNotFound("adjacency loop search exhausted its budget");
}

inline OrientingLoop find_orienting_loop(const GeoGraph& g, LoopMode mode,
                                         const UnitBallRelation* b = nullptr,
                                         std::uint64_t seed = 1,
                                         const LoopSearchConfig& cfg = {}) {
  if (mode == LoopMode::ground_truth)
    return find_orienting_loop_ground_truth(g, seed, cfg.start_attempts);
  if (!b) throw NotApplicable("adjacency loop search needs a ball relation");
  return find_orienting_loop_adjacency(*b, seed, cfg);
}

struct TranslateResult {
  std::size_t vertex;
  /// Integer-distance-free samples never realize the exact translate, so
  /// the returned vertex is the interval's order-minimum surrogate.
  bool approximate = true;
};

/// Order, band-interval and translate reconstruction over (B, loop).
/// Builds the per-vertex arc assignment and a global cyclic rank once;
/// queries run off those caches plus a memo of band intervals.
///
/// witness_slack guards the band construction against rank fuzz at the
/// unit-distance horizon: a band member must sit below the (slack+1)-th
/// most extreme far witness instead of the single most extreme one. This
/// trims at most `slack` boundary vertices from each band and keeps
/// horizon misrankings from leaking backward points into the bands.
class OrderReconstruction {
 public:
  OrderReconstruction(const UnitBallRelation& b, OrientingLoop loop,
                      std::size_t witness_slack = 2)
      : b_(&b), loop_(std::move(loop)), n_(b.size()), slack_(witness_slack) {
    const std::size_t arcs = loop_.arc_count();
    if (arcs < 4)
      throw LoopNotFound("orienting loop needs at least 4 vertices");
    for (std::size_t i = 0; i < arcs; ++i)
      arc_sets_.push_back(recover_interval(*b_, loop_.at(i), loop_.at(i + 1)));
    arc_.assign(n_, 0);
    pos_.assign(n_, 0);
    std::vector<long> loop_index(n_, -1);
    for (std::size_t i = 0; i < arcs; ++i) loop_index[loop_.at(i)] = long(i);
    for (std::size_t x = 0; x < n_; ++x) {
      if (loop_index[x] >= 0) {
        arc_[x] = std::size_t(loop_index[x]);
        pos_[x] = 0;
        continue;
      }
      std::size_t best_arc = arcs;
      std::size_t best_margin = 0;
      std::size_t best_pos = 0;
      for (std::size_t i = 0; i < arcs; ++i) {
        if (!arc_sets_[i].test(x)) continue;
        const std::size_t pos = position_in_arc(x, i);
        const std::size_t sz = arc_sets_[i].count();
        const std::size_t margin = std::min(pos, sz > pos ? sz - pos : 0);
        if (best_arc == arcs || margin > best_margin) {
          best_arc = i;
          best_margin = margin;
          best_pos = pos;
        }
      }
      if (best_arc == arcs) {
        // Orphan (boundary fuzz): most ball mass decides.
        std::size_t best_overlap = 0;
        best_arc = 0;
        for (std::size_t i = 0; i < arcs; ++i) {
          const std::size_t overlap = b_->rows[x].count_and(arc_sets_[i]);
          if (overlap > best_overlap) {
            best_overlap = overlap;
            best_arc = i;
          }
        }
        best_pos = position_in_arc(x, best_arc);
      }
      arc_[x] = best_arc;
      pos_[x] = best_pos + 1;  // loop vertex of the arc sorts first
    }
    std::vector<std::size_t> order(n_);
    for (std::size_t i = 0; i < n_; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
      if (arc_[a] != arc_[c]) return arc_[a] < arc_[c];
      if (pos_[a] != pos_[c]) return pos_[a] < pos_[c];
      return a < c;
    });
    rank_.assign(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) rank_[order[i]] = i;
  }

  std::size_t size() const { return n_; }
  const OrientingLoop& loop() const { return loop_; }
  std::size_t arc_of(std::size_t v) const { return arc_[v]; }
  std::size_t rank_of(std::size_t v) const { return rank_[v]; }

  /// T(x,y,z): some uni-directional walk from a loop vertex, spanning fewer
  /// than all arcs, meets x, y, z in this order.
  bool forward_chain(std::size_t x, std::size_t y, std::size_t z) const {
    const std::size_t arcs = loop_.arc_count();
    for (std::size_t i = 0; i < arcs; ++i) {
      const auto kx = rebased_key(x, i), ky = rebased_key(y, i), kz = rebased_key(z, i);
      if (kx.first > arcs - 2 || ky.first > arcs - 2 || kz.first > arcs - 2)
        continue;
      if (kx < ky && ky < kz) return true;
    }
    return false;
  }

  /// Recovered circular order; degenerate triples are an error.
  bool order(std::size_t x, std::size_t y, std::size_t z) const {
    if (x == y || y == z || x == z)
      throw DegenerateTriple("recovered order needs pairwise distinct vertices");
    return strict_order(x, y, z);
  }

  /// Same as order() but false on repeated arguments; used inside formula
  /// evaluation where quantifiers range over everything.
  bool strict_order(std::size_t x, std::size_t y, std::size_t z) const {
    if (x == y || y == z || x == z) return false;
    return forward_chain(x, y, z) || forward_chain(y, z, x) ||
           forward_chain(z, x, y);
  }

  /// Band interval: the recovered vertex set of the half-open unit band
  /// `shift` units forward of a (mirrored construction for negative shift).
  /// Each inductive level subtracts the trailing window of earlier levels;
  /// on an exact structure those are disjoint anyway (their offsets stay
  /// below the circle length), and on finite samples the subtraction stops
  /// boundary strays from smearing backward through the chain.
  const DynBitset& band(std::size_t a, long shift) const {
    auto key = std::make_pair(a, shift);
    auto it = band_cache_.find(key);
    if (it != band_cache_.end()) return it->second;
    DynBitset result(n_);
    if (shift == 0) {
      result = base_band(a, /*forward=*/true);
    } else {
      // Forward: F[a,a+1) is the level-0 band, so `shift` chain steps.
      // Backward: the base (a-1, a] is already the shift -1 band.
      const bool forward = shift > 0;
      const long steps = forward ? shift : -shift - 1;
      const std::size_t window = loop_.arc_count() - 2;
      std::vector<DynBitset> recent;
      recent.push_back(base_band(a, !forward));  // guard band behind the chain
      DynBitset cur = base_band(a, forward);
      recent.push_back(cur);
      for (long level = 1; level <= steps; ++level) {
        DynBitset next(n_);
        cur.for_each([&](std::size_t z) { next |= base_band(z, forward); });
        for (const auto& w : recent) next.subtract(w);
        if (next.none() && std::size_t(std::labs(shift)) < loop_.arc_count() - 1)
          throw ApproximationFailure(
              "band construction hit an empty level inside the circle");
        recent.push_back(next);
        if (recent.size() > window) recent.erase(recent.begin());
        cur = std::move(next);
      }
      result = std::move(cur);
    }
    return band_cache_.emplace(key, std::move(result)).first->second;
  }

  /// Order-minimum of the band interval `shift` units forward of x: the
  /// finite surrogate for the translate x + shift. The minimum is taken in
  /// the order rebased at x, i.e. the band member nearest the target going
  /// forward from x.
  std::optional<TranslateResult> translate(std::size_t x, long shift) const {
    if (shift == 0) throw Error("translate needs a nonzero shift");
    DynBitset f = band(x, shift);
    // Left-closed reading of the mirrored bands: the source point is the
    // realized right endpoint and never the translate itself.
    if (shift < 0) f.reset(x);
    if (f.none()) return std::nullopt;
    // The band occupies a short contiguous run of the cyclic rank order,
    // possibly with a handful of isolated strays. The minimum is the
    // member with the main run ahead of it and nothing behind: score by
    // following-cluster size minus weighted leading-cluster size.
    std::vector<std::pair<std::size_t, std::size_t>> members;  // (rank, vertex)
    f.for_each([&](std::size_t v) { members.emplace_back(rank_[v], v); });
    std::sort(members.begin(), members.end());
    const std::size_t stride =
        std::max<std::size_t>(4, 2 * n_ / loop_.arc_count());
    long best_score = LONG_MIN;
    std::size_t vertex = members.front().second;
    for (const auto& [r, v] : members) {
      long after = 0, before = 0;
      for (const auto& [r2, v2] : members) {
        if (v2 == v) continue;
        const std::size_t fwd = (r2 + n_ - r) % n_;
        if (fwd > 0 && fwd <= stride) ++after;
        if (fwd > n_ - stride) ++before;
      }
      const long score = after - 3 * before;
      if (score > best_score) {
        best_score = score;
        vertex = v;
      }
    }
    return TranslateResult{vertex, true};
  }

  /// Shifted order relation on (a, c, b): the three-case disjunction over
  /// band tests J and interval membership D.
  bool shifted_order(long z, long t, long k, std::size_t a, std::size_t c,
                     std::size_t b) const {
    if (a == c || c == b || a == b)
      throw DegenerateTriple("shifted order needs pairwise distinct vertices");
    return shifted_order_points(z, t, k, a, c, b);
  }

  /// Same relation on shifted points: repeated vertices are legal as long
  /// as the shifts separate them (the band formulas only see points).
  bool shifted_order_points(long z, long t, long k, std::size_t a, std::size_t c,
                            std::size_t b) const {
    return (band_separated(a, z, b, k) && in_between(c, a, z - t, b, k - t)) ||
           (band_separated(c, t, a, z) && in_between(b, c, t - k, a, z - k)) ||
           (band_separated(b, k, c, t) && in_between(a, b, k - z, c, t - z));
  }

 private:
  /// J condition: the band of (a + z) is neither inside the two consecutive
  /// bands of (b + k) nor, exceptionally, equal to the successor band.
  bool band_separated(std::size_t a, long z, std::size_t b, long k) const {
    const DynBitset& fa = band(a, z);
    const DynBitset& fb = band(b, k);
    const DynBitset& fb1 = band(b, k + 1);
    DynBitset unioned = fb;
    unioned |= fb1;
    if (!fa.is_subset_of(unioned)) return true;
    return fa == fb1;
  }

  /// D membership: exists v in band(a1+s1) with C(v, x, v') for every v' in
  /// band(b1+s2).
  bool in_between(std::size_t x, std::size_t a1, long s1, std::size_t b1,
                  long s2) const {
    const DynBitset& f1 = band(a1, s1);
    const DynBitset& f2 = band(b1, s2);
    if (f2.none()) return false;
    bool found = false;
    f1.for_each([&](std::size_t v) {
      if (found) return;
      bool all = true;
      f2.for_each([&](std::size_t vp) {
        if (all && !strict_order(v, x, vp)) all = false;
      });
      if (all) found = true;
    });
    return found;
  }

  std::pair<std::size_t, std::pair<std::size_t, std::size_t>> rebased_key(
      std::size_t v, std::size_t i) const {
    const std::size_t arcs = loop_.arc_count();
    return {(arc_[v] + arcs - i) % arcs, {pos_[v], v}};
  }

  std::size_t position_in_arc(std::size_t x, std::size_t i) const {
    const std::size_t head = loop_.at(i), tail = loop_.at(i + 1);
    if (x != head && b_->rows[head].test(x))
      return recover_interval(*b_, head, x).count();
    if (x != tail && b_->rows[tail].test(x)) {
      const std::size_t sz = arc_sets_[i].count();
      const std::size_t back = recover_interval(*b_, x, tail).count();
      return sz > back ? sz - back : 0;
    }
    return arc_sets_[i].count() / 2;
  }

  /// Base band: forward gives F[a, a+1), backward gives the mirrored
  /// (a-1, a]. Membership follows the one-step formula with the witness
  /// quantifier collapsed onto the extreme far vertex in rank order.
  DynBitset base_band(std::size_t a, bool forward) const {
    auto& cache = forward ? fwd_base_ : bwd_base_;
    auto it = cache.find(a);
    if (it != cache.end()) return it->second;
    DynBitset out(n_);
    out.set(a);
    // Far set: complement of the stored ball around a (minus a itself).
    // The window closes at the (slack+1)-th most extreme far vertex.
    std::vector<std::size_t> far_rb;
    for (std::size_t w = 0; w < n_; ++w) {
      if (w == a || b_->rows[a].test(w)) continue;
      far_rb.push_back(forward ? (rank_[w] + n_ - rank_[a]) % n_
                               : (rank_[a] + n_ - rank_[w]) % n_);
    }
    if (!far_rb.empty()) {
      const std::size_t drop = std::min(slack_, far_rb.size() - 1);
      std::nth_element(far_rb.begin(), far_rb.begin() + drop, far_rb.end(),
                       std::greater<std::size_t>());
      const std::size_t far_limit = far_rb[drop];
      b_->rows[a].for_each([&](std::size_t x) {
        const std::size_t rb = forward ? (rank_[x] + n_ - rank_[a]) % n_
                                       : (rank_[a] + n_ - rank_[x]) % n_;
        if (rb > 0 && rb < far_limit) out.set(x);
      });
    }
    return cache.emplace(a, std::move(out)).first->second;
  }

  const UnitBallRelation* b_;
  OrientingLoop loop_;
  std::size_t n_;
  std::size_t slack_;
  std::vector<DynBitset> arc_sets_;
  std::vector<std::size_t> arc_;
  std::vector<std::size_t> pos_;
  std::vector<std::size_t> rank_;
  mutable std::map<std::pair<std::size_t, long>, DynBitset> band_cache_;
  mutable std::map<std::size_t, DynBitset> fwd_base_;
  mutable std::map<std::size_t, DynBitset> bwd_base_;
};

// One-shot wrappers matching the per-operation surface. Each builds the
// reconstruction caches from scratch; use OrderReconstruction directly for
// repeated queries.

inline bool recover_order(const UnitBallRelation& b, const OrientingLoop& loop,
                          std::size_t x, std::size_t y, std::size_t z) {
  return OrderReconstruction(b, loop).order(x, y, z);
}

inline DynBitset recover_band_interval(const UnitBallRelation& b,
                                       const OrientingLoop& loop, std::size_t a,
                                       long shift) {
  return OrderReconstruction(b, loop).band(a, shift);
}

inline std::optional<TranslateResult> recover_translate(
    const UnitBallRelation& b, const OrientingLoop& loop, std::size_t x,
    long shift) {
  return OrderReconstruction(b, loop).translate(x, shift);
}

inline bool recover_shifted_order(const UnitBallRelation& b,
                                  const OrientingLoop& loop, long z, long t,
                                  long k, std::size_t a, std::size_t c,
                                  std::size_t bb) {
  return OrderReconstruction(b, loop).shifted_order(z, t, k, a, c, bb);
}

/// Diagnostic: pairs where one-step translate chains and the direct k-step
/// translate land on the same vertex in both directions, which on a finite
/// sample hints at a realized integer distance. Reported, never acted on.
struct IntegerDistanceSuspect {
  std::size_t from;
  std::size_t to;
  long shift;
};

inline std::vector<IntegerDistanceSuspect> integer_distance_suspects(
    const OrderReconstruction& rec, std::size_t probes, std::uint64_t seed) {
  std::vector<IntegerDistanceSuspect> out;
  Rng rng = substream(seed, stream::kProbe, 7);
  for (std::size_t i = 0; i < probes; ++i) {
    const std::size_t a = rng.below(rec.size());
    for (long k : {1L, 2L}) {
      auto direct = rec.translate(a, k);
      if (!direct) continue;
      std::optional<TranslateResult> chained = TranslateResult{a, true};
      for (long step = 0; step < k && chained; ++step)
        chained = rec.translate(chained->vertex, 1);
      if (!chained || chained->vertex != direct->vertex) continue;
      auto back = rec.translate(direct->vertex, -k);
      if (back && back->vertex == a)
        out.push_back({a, direct->vertex, k});
    }
  }
  return out;
}

}  // namespace grg::recovery
