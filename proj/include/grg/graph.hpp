#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "grg/bitset.hpp"
#include "grg/errors.hpp"
#include "grg/rng.hpp"
#include "grg/sample.hpp"

namespace grg {

/// Unit-threshold random graph over a sample: vertices are sample indices,
/// edges only ever join points at distance < 1. Coordinates are optional;
/// stripping them leaves a pure adjacency structure that the recovery
/// pipeline accepts. Immutable after construction.
struct GeoGraph {
  std::optional<SpaceDescriptor> space;
  std::optional<std::vector<Point>> coords;
  std::vector<DynBitset> adj;
  std::optional<double> p;
  std::optional<std::uint64_t> seed;
  std::optional<double> integer_margin;

  std::size_t size() const { return adj.size(); }

  bool adjacent(std::size_t u, std::size_t v) const { return adj[u].test(v); }

  const DynBitset& row(std::size_t v) const {
    if (v >= adj.size()) throw IndexOutOfRange("vertex index out of range");
    return adj[v];
  }

  std::size_t degree(std::size_t v) const { return row(v).count(); }

  bool has_coords() const { return coords.has_value(); }

  const Point& coord(std::size_t v) const {
    if (!coords) throw NotApplicable("graph has no coordinates");
    return (*coords)[v];
  }

  double dist(std::size_t u, std::size_t v) const {
    if (!space || !coords) throw NotApplicable("graph has no coordinates");
    return space->distance((*coords)[u], (*coords)[v]);
  }

  std::size_t edge_count() const {
    std::size_t c = 0;
    for (const auto& r : adj) c += r.count();
    return c / 2;
  }

  /// Test/tool helper: build a coordinate-free graph from explicit edges.
  static GeoGraph from_edges(std::size_t n,
                             const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    GeoGraph g;
    g.adj.assign(n, DynBitset(n));
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw IndexOutOfRange("edge endpoint out of range");
      if (u == v) throw Error("self-loops are not allowed");
      g.adj[u].set(v);
      g.adj[v].set(u);
    }
    return g;
  }
};

/// Independent coin per unordered pair at distance < 1; pairs at distance
/// >= 1 are never joined. Coins are keyed by (seed, min, max), so the result
/// is deterministic and independent of generation order.
inline GeoGraph generate(const SampleSet& sample, double p, std::uint64_t seed) {
  if (!(p > 0 && p < 1)) throw Error("edge probability must lie in (0, 1)");
  if (sample.points.empty()) throw EmptySample("cannot generate over an empty sample");
  const std::size_t n = sample.size();
  GeoGraph g;
  g.space = sample.space;
  g.coords = sample.points;
  g.p = p;
  g.seed = seed;
  g.integer_margin = sample.config.integer_margin;
  g.adj.assign(n, DynBitset(n));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      if (sample.space.distance(sample.points[u], sample.points[v]) >= 1.0)
        continue;
      if (edge_coin(seed, u, v, p)) {
        g.adj[u].set(v);
        g.adj[v].set(u);
      }
    }
  return g;
}

/// Vertices reachable from v by an edge walk of length between 1 and k.
/// Repeated vertices are allowed, so for k >= 2 any non-isolated v lies in
/// its own neighborhood; N_1(v) is exactly the adjacency row.
inline DynBitset neighbors_k(const GeoGraph& g, std::size_t v, unsigned k) {
  if (v >= g.size()) throw IndexOutOfRange("vertex index out of range");
  if (k == 0) throw Error("neighborhood depth must be positive");
  DynBitset reach = g.row(v);
  DynBitset frontier = reach;
  for (unsigned level = 2; level <= k; ++level) {
    DynBitset next(g.size());
    frontier.for_each([&](std::size_t w) { next |= g.row(w); });
    next.subtract(reach);
    if (next.none()) break;
    reach |= next;
    frontier = next;
  }
  if (k >= 2 && g.degree(v) > 0) reach.set(v);
  if (k == 1) reach.assign(v, g.adjacent(v, v));  // no self-loops: clears v
  return reach;
}

/// Identical adjacency with coordinates and space removed.
inline GeoGraph strip_coordinates(const GeoGraph& g) {
  GeoGraph out;
  out.adj = g.adj;
  out.p = g.p;
  out.seed = g.seed;
  out.integer_margin = g.integer_margin;
  return out;
}

/// Per-vertex N_k layers, materialized one level at a time under a lock;
/// readers never observe a partially built level.
class NeighborhoodCache {
 public:
  explicit NeighborhoodCache(const GeoGraph& g) : g_(&g) {}

  const DynBitset& layer(std::size_t v, unsigned k) {
    if (v >= g_->size()) throw IndexOutOfRange("vertex index out of range");
    if (k == 0) throw Error("neighborhood depth must be positive");
    std::lock_guard<std::mutex> lock(mu_);
    auto it = levels_.find(k);
    if (it == levels_.end()) {
      std::vector<DynBitset> level;
      level.reserve(g_->size());
      for (std::size_t u = 0; u < g_->size(); ++u)
        level.push_back(neighbors_k(*g_, u, k));
      it = levels_.emplace(k, std::move(level)).first;
    }
    return it->second[v];
  }

 private:
  const GeoGraph* g_;
  std::mutex mu_;
  std::map<unsigned, std::vector<DynBitset>> levels_;
};

}  // namespace grg
