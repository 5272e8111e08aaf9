#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grg/bitset.hpp"
#include "grg/errors.hpp"
#include "grg/rational.hpp"
#include "grg/rng.hpp"

namespace grg::urysohn {

/// One-point extension data: a prospective distance to every existing
/// point. Valid exactly when |f(x)-f(y)| <= d(x,y) <= f(x)+f(y) for all
/// pairs, which is precisely the condition for the extension to stay a
/// metric space.
struct KatetovFunction {
  std::vector<Rat> values;  // aligned with the space's point indices
};

struct KatetovViolation {
  std::size_t x, y;
  bool lower;  // |f(x)-f(y)| > d(x,y) when true, d > f(x)+f(y) otherwise
};

inline std::optional<KatetovViolation> katetov_violation(
    const RationalMetricSpace& s, const KatetovFunction& f) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (f.values[i] <= 0) return KatetovViolation{i, i, true};
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (rat_abs(f.values[i] - f.values[j]) > s.dist(i, j))
        return KatetovViolation{i, j, true};
      if (s.dist(i, j) > f.values[i] + f.values[j])
        return KatetovViolation{i, j, false};
    }
  }
  return std::nullopt;
}

/// Appends one point at the prescribed distances; exact, and validated.
inline RationalMetricSpace katetov_extend(const RationalMetricSpace& s,
                                          const KatetovFunction& f,
                                          const std::string& new_label) {
  if (f.values.size() != s.size())
    throw Error("katetov function arity mismatch");
  if (auto v = katetov_violation(s, f))
    throw NotKatetov("katetov condition fails between points " +
                     std::to_string(v->x) + " and " + std::to_string(v->y));
  RationalMetricSpace out = s;
  out.add_point(new_label, f.values);
  return out;
}

/// Integer band of a non-integer positive distance: the n with
/// n-1 < d < n.
inline long band_of(const Rat& d) {
  if (d <= 0 || rat_is_integer(d))
    throw IntegerDistance("distance " + rat_string(d) + " has no band");
  return long(rat_ceil(d).convert_to<long>());
}

/// Partial bijection between two spaces that preserves every integer
/// distance band.
struct BandMap {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  std::size_t size() const { return pairs.size(); }

  std::optional<std::size_t> image(std::size_t x) const {
    for (auto [a, b] : pairs)
      if (a == x) return b;
    return std::nullopt;
  }
  std::optional<std::size_t> preimage(std::size_t y) const {
    for (auto [a, b] : pairs)
      if (b == y) return a;
    return std::nullopt;
  }

  BandMap transposed() const {
    BandMap t;
    for (auto [a, b] : pairs) t.pairs.emplace_back(b, a);
    return t;
  }
};

inline bool band_preserving(const RationalMetricSpace& x,
                            const RationalMetricSpace& y, const BandMap& map,
                            std::string* why = nullptr) {
  for (std::size_t i = 0; i < map.size(); ++i)
    for (std::size_t j = i + 1; j < map.size(); ++j) {
      const auto [xi, yi] = map.pairs[i];
      const auto [xj, yj] = map.pairs[j];
      if (xi == xj || yi == yj) {
        if (why) *why = "map is not injective";
        return false;
      }
      const Rat& dx = x.dist(xi, xj);
      const Rat& dy = y.dist(yi, yj);
      if (rat_is_integer(dx) || rat_is_integer(dy)) {
        if (why) *why = "integer distance between mapped points";
        return false;
      }
      if (rat_ceil(dx) != rat_ceil(dy)) {
        if (why)
          *why = "band mismatch: " + rat_string(dx) + " vs " + rat_string(dy);
        return false;
      }
    }
  return true;
}

/// Band sets of a fresh source point: band n maps to the images of the
/// mapped points whose distance from x0 lies in (n-1, n).
using BandSets = std::map<long, std::vector<std::size_t>>;

inline BandSets band_sets(const RationalMetricSpace& x, const BandMap& map,
                          std::size_t x0) {
  BandSets out;
  for (auto [a, b] : map.pairs) out[band_of(x.dist(x0, a))].push_back(b);
  return out;
}

/// Margin of y' in band n against all lower bands:
/// min { d(y'', y') - (n-k) + 1 : y'' in band k, k < n }; nullopt when no
/// lower band exists. Band preservation forces the margin positive.
inline std::optional<Rat> band_margin(const RationalMetricSpace& y,
                                      const BandSets& bands, std::size_t yprime) {
  long home = 0;
  bool found = false;
  for (const auto& [n, members] : bands)
    for (std::size_t m : members)
      if (m == yprime) {
        if (found) throw Error("point sits in two bands");
        home = n;
        found = true;
      }
  if (!found) throw Error("point is not in any band");
  std::optional<Rat> best;
  for (const auto& [k, members] : bands) {
    if (k >= home) break;
    for (std::size_t m : members) {
      Rat candidate = y.dist(m, yprime) - Rat(home - k) + 1;
      if (!best || candidate < *best) best = candidate;
    }
  }
  if (best && *best <= 0)
    throw NonPositiveEpsilon("margin " + rat_string(*best) +
                             " is not positive; the map is corrupted");
  return best;
}

/// The separation parameter: one tenth of the minimum of all band margins
/// and all band-edge clearances m - d, d - (m-1) over the mapped targets;
/// 1/10 when every constraint is vacuous. Strictly below the bound the
/// construction needs (one fifth of the same minimum).
inline Rat choose_epsilon(const RationalMetricSpace& y, const BandSets& bands,
                          const std::vector<std::size_t>& members,
                          unsigned divisor = 10) {
  std::optional<Rat> minimum;
  auto consider = [&](const Rat& r) {
    if (!minimum || r < *minimum) minimum = r;
  };
  for (const auto& [n, bucket] : bands) {
    for (std::size_t yp : bucket)
      if (auto m = band_margin(y, bands, yp)) consider(*m);
  }
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const Rat& d = y.dist(members[i], members[j]);
      if (rat_is_integer(d))
        throw IntegerDistance("mapped points at integer distance " +
                              rat_string(d));
      const Rat m(rat_ceil(d));
      consider(m - d);
      consider(d - (m - 1));
    }
  if (!minimum) return Rat(1, divisor);
  return *minimum / divisor;
}

/// Prescribed distances from the prospective new point to every mapped
/// target: n-1+margin-2*eps when the margin is below one, n-eps otherwise.
/// Every value lands strictly inside its band, eps-deep.
struct ExtensionAssignment {
  std::size_t source = 0;                              // x0
  Rat epsilon;
  BandSets bands;
  std::vector<std::pair<std::size_t, Rat>> distances;  // target in Y -> value

  std::optional<Rat> value_for(std::size_t target) const {
    for (const auto& [t, v] : distances)
      if (t == target) return v;
    return std::nullopt;
  }
};

inline ExtensionAssignment extension_distances(const RationalMetricSpace& x,
                                               const RationalMetricSpace& y,
                                               const BandMap& map, std::size_t x0,
                                               unsigned epsilon_divisor = 10) {
  ExtensionAssignment out;
  out.source = x0;
  out.bands = band_sets(x, map, x0);
  std::vector<std::size_t> members;
  for (auto [a, b] : map.pairs) members.push_back(b);
  out.epsilon = choose_epsilon(y, out.bands, members, epsilon_divisor);
  for (const auto& [n, bucket] : out.bands)
    for (std::size_t yp : bucket) {
      const auto margin = band_margin(y, out.bands, yp);
      Rat value;
      if (margin && *margin < 1)
        value = Rat(n - 1) + *margin - 2 * out.epsilon;
      else
        value = Rat(n) - out.epsilon;
      if (!(Rat(n - 1) < value && value < Rat(n)))
        throw Error("assignment escaped its band; construction corrupted");
      out.distances.emplace_back(yp, value);
    }
  return out;
}

/// Exact triangle check of the assignment against the target space: for
/// each pair of assigned points the prospective distances must satisfy
/// both triangle inequalities. The construction guarantees this; the suite
/// verifies rather than trusts.
inline std::optional<MetricViolation> verify_extension_triangles(
    const RationalMetricSpace& y, const ExtensionAssignment& a) {
  for (std::size_t i = 0; i < a.distances.size(); ++i)
    for (std::size_t j = i + 1; j < a.distances.size(); ++j) {
      const auto& [y1, v1] = a.distances[i];
      const auto& [y2, v2] = a.distances[j];
      const Rat& d = y.dist(y1, y2);
      if (rat_abs(v1 - v2) > d)
        return MetricViolation{MetricViolation::Kind::triangle, y1, y2, 0};
      if (d > v1 + v2)
        return MetricViolation{MetricViolation::Kind::triangle, y1, y2, 1};
    }
  return std::nullopt;
}

enum class ExtendMode { exact, snap };

struct ExtendOutcome {
  BandMap map;
  std::size_t realized;  // index of the partner point in the target space
  bool grew = false;     // exact mode added a point
};

namespace detail {

/// Completes a partial distance assignment to the whole space by the
/// shortest-path rule f(w) = min (a(y') + d(y', w)); exact and Katetov.
inline KatetovFunction complete_assignment(const RationalMetricSpace& y,
                                           const ExtensionAssignment& a) {
  KatetovFunction f;
  f.values.resize(y.size());
  for (std::size_t w = 0; w < y.size(); ++w) {
    if (auto direct = a.value_for(w)) {
      f.values[w] = *direct;
      continue;
    }
    std::optional<Rat> best;
    for (const auto& [t, v] : a.distances) {
      Rat candidate = v + y.dist(t, w);
      if (!best || candidate < *best) best = candidate;
    }
    f.values[w] = best ? *best : Rat(0);
  }
  return f;
}

inline bool introduces_integer_distance(const KatetovFunction& f) {
  for (const Rat& v : f.values)
    if (rat_is_integer(v)) return true;
  return false;
}

}  // namespace detail

/// One back-and-forth step with x0 fresh on the source side. Exact mode
/// grows the target space by the realized point (retrying with smaller
/// separation parameters if a completed distance would land on an
/// integer); snap mode reuses an existing target point within eps/2 in the
/// sup norm over the prescribed distances, or fails.
inline ExtendOutcome extend_one_point(RationalMetricSpace& x,
                                      RationalMetricSpace& y, const BandMap& map,
                                      std::size_t x0, ExtendMode mode) {
  if (map.image(x0)) throw Error("source point is already mapped");
  {
    std::string why;
    if (!band_preserving(x, y, map, &why))
      throw Error("input map does not preserve bands: " + why);
  }

  if (map.size() == 0) {
    // Nothing is constrained. Exact mode mirrors the point at a fixed
    // non-integer distance from everything; snap mode grabs any point.
    ExtendOutcome out;
    if (mode == ExtendMode::snap) {
      if (y.size() == 0) throw SnapFailure("empty target space");
      out.realized = 0;
    } else {
      Rat c = Rat(rat_ceil(y.diameter() / 2)) + Rat(1, 3);
      KatetovFunction f;
      f.values.assign(y.size(), c);
      y = katetov_extend(y, f, "g" + std::to_string(y.size()));
      out.realized = y.size() - 1;
      out.grew = true;
    }
    out.map = map;
    out.map.pairs.emplace_back(x0, out.realized);
    return out;
  }

  if (mode == ExtendMode::snap) {
    // Prescribed distances are the source's own: an existing target point
    // within eps/2 of them in the sup norm stands in for the new point,
    // provided every band still matches exactly.
    const Rat eps = choose_epsilon(y, band_sets(x, map, x0), [&] {
      std::vector<std::size_t> members;
      for (auto [a, b] : map.pairs) members.push_back(b);
      return members;
    }());
    const Rat limit = eps / 2;
    std::optional<std::size_t> best;
    std::optional<Rat> best_err;
    for (std::size_t w = 0; w < y.size(); ++w) {
      if (map.preimage(w)) continue;
      Rat err(0);
      bool bands_ok = true;
      for (auto [a, b] : map.pairs) {
        if (b == w) { bands_ok = false; break; }
        const Rat& dw = y.dist(w, b);
        if (rat_is_integer(dw) || rat_ceil(dw) != rat_ceil(x.dist(x0, a))) {
          bands_ok = false;
          break;
        }
        Rat e = rat_abs(dw - x.dist(x0, a));
        if (e > err) err = e;
      }
      if (bands_ok && err < limit && (!best_err || err < *best_err)) {
        best = w;
        best_err = err;
      }
    }
    if (!best)
      throw SnapFailure("no existing point matches the prescribed distances");
    ExtendOutcome out;
    out.realized = *best;
    out.map = map;
    out.map.pairs.emplace_back(x0, *best);
    std::string why;
    if (!band_preserving(x, y, out.map, &why))
      throw Error("snapped point broke band preservation: " + why);
    return out;
  }

  // Exact mode. The fixed choice eps = bound/10 occasionally makes a
  // completed distance integral; any value under bound/5 is valid, so walk
  // a deterministic ladder of smaller choices until the whole completion
  // stays integer-free.
  for (unsigned divisor : {10u, 14u, 22u, 26u, 34u, 46u}) {
    const auto assignment = extension_distances(x, y, map, x0, divisor);
    if (auto bad = verify_extension_triangles(y, assignment))
      throw Error("assignment violates a triangle; construction corrupted");
    KatetovFunction f = detail::complete_assignment(y, assignment);
    if (detail::introduces_integer_distance(f)) continue;
    RationalMetricSpace grown =
        katetov_extend(y, f, "g" + std::to_string(y.size()));
    ExtendOutcome out;
    out.realized = grown.size() - 1;
    out.grew = true;
    out.map = map;
    out.map.pairs.emplace_back(x0, out.realized);
    std::string why;
    if (!band_preserving(x, grown, out.map, &why))
      throw Error("extension broke band preservation: " + why);
    y = std::move(grown);
    return out;
  }
  throw Error("no separation parameter avoided integer completions");
}

enum class MapSide { left, right };

/// Side-dispatching wrapper: x0 lives on the stated side; the map always
/// goes left to right.
inline ExtendOutcome extend_map(RationalMetricSpace& left,
                                RationalMetricSpace& right, const BandMap& map,
                                std::size_t x0, MapSide side, ExtendMode mode) {
  if (side == MapSide::left) return extend_one_point(left, right, map, x0, mode);
  ExtendOutcome mirrored =
      extend_one_point(right, left, map.transposed(), x0, mode);
  mirrored.map = mirrored.map.transposed();
  return mirrored;
}

struct BackAndForthResult {
  BandMap map;
  RationalMetricSpace left;
  RationalMetricSpace right;
  std::size_t rounds_played = 0;
};

/// Alternating one-point extensions, fresh points chosen by seed from the
/// unmapped points of the active side (originals and grown points alike).
inline BackAndForthResult back_and_forth(const RationalMetricSpace& u1,
                                         const RationalMetricSpace& u2,
                                         std::size_t rounds, std::uint64_t seed,
                                         ExtendMode mode = ExtendMode::exact) {
  BackAndForthResult r;
  r.left = u1;
  r.right = u2;
  Rng rng = substream(seed, stream::kGame, 77);
  for (std::size_t round = 0; round < rounds; ++round) {
    const MapSide side = round % 2 == 0 ? MapSide::left : MapSide::right;
    RationalMetricSpace& source = side == MapSide::left ? r.left : r.right;
    std::vector<std::size_t> fresh;
    for (std::size_t i = 0; i < source.size(); ++i) {
      const bool taken = side == MapSide::left ? r.map.image(i).has_value()
                                               : r.map.preimage(i).has_value();
      if (!taken) fresh.push_back(i);
    }
    if (fresh.empty()) break;
    const std::size_t x0 = fresh[rng.below(fresh.size())];
    auto outcome = extend_map(r.left, r.right, r.map, x0, side, mode);
    r.map = outcome.map;
    r.rounds_played = round + 1;
  }
  std::string why;
  if (!band_preserving(r.left, r.right, r.map, &why))
    throw Error("final map does not preserve bands: " + why);
  return r;
}

// ---------------------------------------------------------------------------
// Unit-threshold graphs over rational spaces and the geometric Rado step.

struct MetricGraph {
  RationalMetricSpace space;
  std::vector<DynBitset> adj;
  double p = 0.5;
  std::uint64_t coin_seed = 0;

  std::size_t size() const { return space.size(); }
  bool adjacent(std::size_t u, std::size_t v) const { return adj[u].test(v); }
};

/// Independent p-coin per pair at distance below one.
inline MetricGraph threshold_graph(RationalMetricSpace space, double p,
                                   std::uint64_t seed) {
  MetricGraph g;
  g.adj.assign(space.size(), DynBitset(space.size()));
  g.p = p;
  g.coin_seed = seed;
  for (std::size_t u = 0; u < space.size(); ++u)
    for (std::size_t v = u + 1; v < space.size(); ++v)
      if (space.dist(u, v) < 1 && edge_coin(seed, u, v, p)) {
        g.adj[u].set(v);
        g.adj[v].set(u);
      }
  g.space = std::move(space);
  return g;
}

inline bool edge_and_band_preserving(const MetricGraph& g1, const MetricGraph& g2,
                                     const BandMap& map, std::string* why = nullptr) {
  if (!band_preserving(g1.space, g2.space, map, why)) return false;
  for (std::size_t i = 0; i < map.size(); ++i)
    for (std::size_t j = i + 1; j < map.size(); ++j) {
      const auto [xi, yi] = map.pairs[i];
      const auto [xj, yj] = map.pairs[j];
      if (g1.adjacent(xi, xj) != g2.adjacent(yi, yj)) {
        if (why) *why = "edge mismatch";
        return false;
      }
    }
  return true;
}

/// Rado step: extend an edge- and band-preserving map by x0. The realized
/// point receives edges to exactly the images of x0's mapped neighbors;
/// in exact mode its edges to unconstrained existing points fall by p-coin
/// where the threshold allows, and snap mode demands an existing point
/// with both the right distances and the right adjacency.
inline ExtendOutcome rado_extend(MetricGraph& g1, MetricGraph& g2,
                                 const BandMap& map, std::size_t x0,
                                 MapSide side, ExtendMode mode) {
  if (side == MapSide::right) {
    std::swap(g1, g2);
    ExtendOutcome out = rado_extend(g1, g2, map.transposed(), x0,
                                    MapSide::left, mode);
    std::swap(g1, g2);
    out.map = out.map.transposed();
    return out;
  }
  {
    std::string why;
    if (!edge_and_band_preserving(g1, g2, map, &why))
      throw Error("input map does not preserve edges and bands: " + why);
  }
  // Q: images of the mapped neighbors of x0 (all within one unit of the
  // prospective point, because edges respect the threshold).
  std::vector<std::size_t> q;
  for (auto [a, b] : map.pairs)
    if (g1.adjacent(x0, a)) q.push_back(b);

  if (mode == ExtendMode::snap) {
    const Rat eps = choose_epsilon(g2.space, band_sets(g1.space, map, x0), [&] {
      std::vector<std::size_t> members;
      for (auto [a, b] : map.pairs) members.push_back(b);
      return members;
    }());
    const Rat limit = eps / 2;
    for (std::size_t w = 0; w < g2.size(); ++w) {
      if (map.preimage(w)) continue;
      bool ok = true;
      for (auto [a, b] : map.pairs) {
        const Rat& dw = g2.space.dist(w, b);
        if (b == w || rat_is_integer(dw) ||
            rat_ceil(dw) != rat_ceil(g1.space.dist(x0, a)) ||
            rat_abs(dw - g1.space.dist(x0, a)) >= limit) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      for (auto [a, b] : map.pairs)
        if (g2.adjacent(w, b) != g1.adjacent(x0, a)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      ExtendOutcome out;
      out.realized = w;
      out.map = map;
      out.map.pairs.emplace_back(x0, w);
      return out;
    }
    throw SnapFailure("no existing vertex matches distances and adjacency");
  }

  ExtendOutcome out =
      extend_one_point(g1.space, g2.space, map, x0, ExtendMode::exact);
  const std::size_t y0 = out.realized;
  for (auto& row : g2.adj) {
    DynBitset wider(g2.size());
    row.for_each([&](std::size_t i) { wider.set(i); });
    row = std::move(wider);
  }
  g2.adj.emplace_back(g2.size());
  for (std::size_t w = 0; w + 1 < g2.size(); ++w) {
    const bool constrained = map.preimage(w).has_value();
    bool edge = false;
    if (constrained) {
      edge = std::find(q.begin(), q.end(), w) != q.end();
    } else if (g2.space.dist(y0, w) < 1) {
      edge = edge_coin(g2.coin_seed, y0, w, g2.p);
    }
    if (edge) {
      g2.adj[y0].set(w);
      g2.adj[w].set(y0);
    }
  }
  {
    std::string why;
    if (!edge_and_band_preserving(g1, g2, out.map, &why))
      throw Error("rado extension broke preservation: " + why);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random instances.

/// Random integer-distance-free rational metric space: bounded-denominator
/// distances repaired by shortest-path closure, rejected until exact and
/// integer-free.
inline RationalMetricSpace random_rational_space(std::size_t max_points,
                                                 std::uint64_t seed,
                                                 bool exact_size = false) {
  Rng rng = substream(seed, stream::kInstance);
  const std::size_t n =
      exact_size ? max_points : std::max<std::size_t>(1, 1 + rng.below(max_points));
  for (int attempt = 0; attempt < 200; ++attempt) {
    RationalMetricSpace s;
    for (std::size_t i = 0; i < n; ++i) s.labels.push_back("x" + std::to_string(i));
    s.d.assign(n, std::vector<Rat>(n, Rat(0)));
    const long dens[] = {5, 7, 9, 11, 12};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const long q = dens[rng.below(5)];
        const long p = 1 + long(rng.below(std::uint64_t(4 * q)));
        s.d[i][j] = s.d[j][i] = Rat(p, q);
      }
    // Shortest-path closure repairs the triangle inequality exactly.
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          Rat via = s.d[i][k] + s.d[k][j];
          if ((i != k && j != k) && via < s.d[i][j]) s.d[i][j] = via;
        }
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = i + 1; j < n && ok; ++j)
        if (s.d[i][j] <= 0 || rat_is_integer(s.d[i][j])) ok = false;
    if (ok && validate_metric(s, true).empty()) return s;
  }
  throw Error("instance generator failed to produce an integer-free metric");
}

/// A companion space plus a band-preserving partial map: a subset of the
/// source is copied, scaled by a band-safe factor, and mixed with an
/// independent random metric while every entry stays inside its band.
inline std::pair<RationalMetricSpace, BandMap> compatible_instance(
    const RationalMetricSpace& x, std::size_t map_size, std::uint64_t seed) {
  Rng rng = substream(seed, stream::kInstance, 3);
  map_size = std::min(map_size, x.size());
  std::vector<std::size_t> chosen(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) chosen[i] = i;
  for (std::size_t i = 0; i < map_size; ++i)
    std::swap(chosen[i], chosen[i + rng.below(chosen.size() - i)]);
  chosen.resize(map_size);

  RationalMetricSpace y;
  for (std::size_t i = 0; i < map_size; ++i)
    y.labels.push_back("y" + std::to_string(i));
  y.d.assign(map_size, std::vector<Rat>(map_size, Rat(0)));
  for (std::size_t i = 0; i < map_size; ++i)
    for (std::size_t j = i + 1; j < map_size; ++j)
      y.d[i][j] = y.d[j][i] = x.dist(chosen[i], chosen[j]);

  // Mix with an independent random metric, exactly, under a coefficient
  // small enough that every distance keeps its band. A convex combination
  // of metrics is a metric, so the mix is all-or-nothing per coefficient.
  if (map_size >= 2) {
    RationalMetricSpace other =
        random_rational_space(map_size, seed ^ 0x9e37, /*exact_size=*/true);
    std::optional<Rat> mu;
    for (std::size_t i = 0; i < map_size; ++i)
      for (std::size_t j = i + 1; j < map_size; ++j) {
        const Rat& d = y.d[i][j];
        const Rat gap_hi = Rat(rat_ceil(d)) - d;
        const Rat gap_lo = d - Rat(rat_ceil(d) - 1);
        const Rat diff = rat_abs(other.d[i][j] - d);
        if (diff == 0) continue;
        Rat cap = (gap_hi < gap_lo ? gap_hi : gap_lo) / (2 * diff);
        if (!mu || cap < *mu) mu = cap;
      }
    if (mu && *mu > 0) {
      const Rat base = *mu < 1 ? *mu : Rat(1);
      for (long div : {1, 2, 3, 5, 7}) {
        const Rat coeff = base / div;
        std::vector<std::vector<Rat>> mixed = y.d;
        bool ok = true;
        for (std::size_t i = 0; i < map_size && ok; ++i)
          for (std::size_t j = i + 1; j < map_size && ok; ++j) {
            mixed[i][j] = mixed[j][i] =
                (1 - coeff) * y.d[i][j] + coeff * other.d[i][j];
            if (rat_is_integer(mixed[i][j])) ok = false;
          }
        if (ok) {
          y.d = std::move(mixed);
          break;
        }
      }
    }
  }

  BandMap map;
  for (std::size_t i = 0; i < map_size; ++i) map.pairs.emplace_back(chosen[i], i);
  std::string why;
  if (!band_preserving(x, y, map, &why))
    throw Error("compatible instance violates bands: " + why);
  if (!validate_metric(y, true).empty())
    throw Error("compatible instance is not an integer-free metric");
  return {std::move(y), std::move(map)};
}

}  // namespace grg::urysohn
