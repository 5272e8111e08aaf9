#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "grg/errors.hpp"
#include "grg/graph.hpp"
#include "grg/recovery.hpp"
#include "grg/rng.hpp"

namespace grg::ef {

enum class Side { left, right };

inline Side other(Side s) { return s == Side::left ? Side::right : Side::left; }

/// Injective partial map between the vertex sets of two graphs.
struct PartialMap {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  std::size_t size() const { return pairs.size(); }

  std::optional<std::size_t> image(std::size_t a) const {
    for (auto [x, y] : pairs)
      if (x == a) return y;
    return std::nullopt;
  }
  std::optional<std::size_t> preimage(std::size_t b) const {
    for (auto [x, y] : pairs)
      if (y == b) return x;
    return std::nullopt;
  }

  PartialMap transposed() const {
    PartialMap t;
    for (auto [x, y] : pairs) t.pairs.emplace_back(y, x);
    return t;
  }

  PartialMap extended(std::size_t a, std::size_t b) const {
    PartialMap e = *this;
    e.pairs.emplace_back(a, b);
    return e;
  }
};

/// One side of a game: the graph plus the shifted-order oracle. By default
/// the order comes from ground-truth coordinates; the recovery variant
/// substitutes the adjacency-only reconstruction to exercise the full
/// pipeline.
class GameSide {
 public:
  explicit GameSide(const GeoGraph& g) : g_(&g) {
    if (!g.has_coords() || !g.space || g.space->kind() != SpaceKind::circle)
      throw NotApplicable("games need circle coordinates");
  }

  GameSide(const GeoGraph& g, const recovery::OrderReconstruction* rec)
      : g_(&g), rec_(rec) {}

  const GeoGraph& graph() const { return *g_; }
  std::size_t size() const { return g_->size(); }

  /// C(a+z, b+t, c+k); false on coincident shifted points.
  bool shifted_order(long z, long t, long k, std::size_t a, std::size_t b,
                     std::size_t c) const {
    if (rec_) return rec_->shifted_order_points(z, t, k, a, b, c);
    const auto& space = *g_->space;
    const Point pa = space.shift(g_->coord(a), double(z));
    const Point pb = space.shift(g_->coord(b), double(t));
    const Point pc = space.shift(g_->coord(c), double(k));
    if (pa == pb || pb == pc || pa == pc) return false;
    return space.circular_order(pa, pb, pc);
  }

  double position(std::size_t v) const { return g_->coord(v).x[0]; }

 private:
  const GeoGraph* g_;
  const recovery::OrderReconstruction* rec_ = nullptr;
};

struct GameContext {
  GameSide left;
  GameSide right;
  /// Cap on |A|^3 * (2^{n+1}+1)^3 order checks per verification.
  std::uint64_t check_budget = 200000000;

  const GameSide& side(Side s) const { return s == Side::left ? left : right; }
};

struct CheckResult {
  bool ok = true;
  std::string violation;
};

/// n-elementary map check: graph isomorphism on the mapped pairs plus
/// agreement of every shifted order with shifts in [-2^n, 2^n].
inline CheckResult check_n_elementary(const GameContext& ctx, const PartialMap& map,
                                      int n) {
  if (n < 0) throw Error("elementarity level must be non-negative");
  const std::size_t m = map.size();
  const long bound = 1L << n;
  const double shifts = double(2 * bound + 1);
  if (double(m) * double(m) * double(m) * shifts * shifts * shifts >
      double(ctx.check_budget))
    throw BudgetExceeded("elementarity check exceeds the configured budget");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto [ai, bi] = map.pairs[i];
      const auto [aj, bj] = map.pairs[j];
      if (ai == aj || bi == bj) return {false, "map is not injective"};
      if (ctx.left.graph().adjacent(ai, aj) != ctx.right.graph().adjacent(bi, bj)) {
        std::ostringstream os;
        os << "edge mismatch on pairs " << i << "," << j;
        return {false, os.str()};
      }
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t l = 0; l < m; ++l)
        for (long z = -bound; z <= bound; ++z)
          for (long t = -bound; t <= bound; ++t)
            for (long k = -bound; k <= bound; ++k) {
              const bool lhs = ctx.left.shifted_order(
                  z, t, k, map.pairs[i].first, map.pairs[j].first,
                  map.pairs[l].first);
              const bool rhs = ctx.right.shifted_order(
                  z, t, k, map.pairs[i].second, map.pairs[j].second,
                  map.pairs[l].second);
              if (lhs != rhs) {
                std::ostringstream os;
                os << "order mismatch at triple (" << i << "," << j << "," << l
                   << ") shifts (" << z << "," << t << "," << k << ")";
                return {false, os.str()};
              }
            }
  return {true, ""};
}

struct ExtendResult {
  bool found = false;
  std::size_t partner = 0;
  PartialMap map;
  std::string note;
};

namespace detail {

/// Duplicator's response for a fresh vertex `a` on the left side of `map`
/// at level n: bracket a by the shifted copies of the mapped vertices,
/// transfer the bracketing arc through the map, and pick a vertex with the
/// matching adjacency pattern inside the image arc.
inline ExtendResult duplicator_extend_left(const GameContext& ctx,
                                           const PartialMap& map, int n,
                                           std::size_t a) {
  const GameSide& ls = ctx.left;
  const GameSide& rs = ctx.right;
  const double llen = ls.graph().space->circle_length();
  const double rlen = rs.graph().space->circle_length();
  const auto& lspace = *ls.graph().space;
  const auto& rspace = *rs.graph().space;

  if (map.size() == 0) {
    // Any single pair is elementary at every level; answer with the vertex
    // nearest the same residue.
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    const Point target = rspace.point({std::min(ls.position(a), rlen * (1 - 1e-12))});
    for (std::size_t v = 0; v < rs.size(); ++v) {
      const double d = rspace.distance(rspace.point({rs.position(v)}), target);
      if (d < best_d) {
        best_d = d;
        best = v;
      }
    }
    ExtendResult r;
    r.found = true;
    r.partner = best;
    r.map = map.extended(a, best);
    return r;
  }

  // Shifted copies of the mapped left vertices, bracketing a.
  const long bound = 1L << n;
  struct ShiftPoint {
    double pos;
    std::size_t origin;  // index into map.pairs
    long shift;
  };
  std::vector<ShiftPoint> cloud;
  for (std::size_t i = 0; i < map.size(); ++i)
    for (long z = -bound; z <= bound; ++z)
      cloud.push_back(
          {lspace.reduce(ls.position(map.pairs[i].first) + double(z)), i, z});
  std::sort(cloud.begin(), cloud.end(),
            [](const ShiftPoint& x, const ShiftPoint& y) { return x.pos < y.pos; });
  const double pa = ls.position(a);
  for (const auto& sp : cloud)
    if (sp.pos == pa)
      throw Error(
          "fresh vertex coincides with a shifted map point; integer-distance "
          "margin violated");
  // Successor and predecessor in cyclic order around a.
  std::size_t succ = 0;
  while (succ < cloud.size() && cloud[succ].pos < pa) ++succ;
  const ShiftPoint& hi = cloud[succ % cloud.size()];
  const ShiftPoint& lo = cloud[(succ + cloud.size() - 1) % cloud.size()];

  // Image arc endpoints through the map.
  const double ilo =
      rspace.reduce(rs.position(map.pairs[lo.origin].second) + double(lo.shift));
  const double ihi =
      rspace.reduce(rs.position(map.pairs[hi.origin].second) + double(hi.shift));

  // Adjacency pattern of a among the mapped vertices.
  std::vector<char> wants(map.size());
  for (std::size_t i = 0; i < map.size(); ++i)
    wants[i] = ls.graph().adjacent(a, map.pairs[i].first);

  // Candidates inside the open image arc (ilo -> ihi forward), ordered from
  // the arc midpoint outward.
  const double arc = rspace.reduce(ihi - ilo);
  const double mid = rspace.reduce(ilo + arc / 2);
  std::vector<std::pair<double, std::size_t>> candidates;
  for (std::size_t v = 0; v < rs.size(); ++v) {
    const double off = rspace.reduce(rs.position(v) - ilo);
    if (off <= 0 || off >= arc) continue;
    if (map.preimage(v)) continue;
    const double from_mid =
        rspace.distance(rspace.point({rs.position(v)}), rspace.point({mid}));
    candidates.emplace_back(from_mid, v);
  }
  std::sort(candidates.begin(), candidates.end());
  for (auto [dist_mid, v] : candidates) {
    bool pattern = true;
    for (std::size_t i = 0; i < map.size() && pattern; ++i)
      if (rs.graph().adjacent(v, map.pairs[i].second) != bool(wants[i]))
        pattern = false;
    if (!pattern) continue;
    ExtendResult r;
    r.found = true;
    r.partner = v;
    r.map = map.extended(a, v);
    return r;
  }
  ExtendResult r;
  r.note = "no vertex in the image arc realizes the adjacency pattern";
  (void)llen;
  return r;
}

}  // namespace detail

/// One Duplicator extension at level n: the fresh vertex sits on `side`,
/// the answer on the other side. The extended map is re-verified to be
/// (n-1)-elementary before it is returned.
inline ExtendResult duplicator_extend(const GameContext& ctx, const PartialMap& map,
                                      int n, std::size_t fresh, Side side) {
  if (n < 1) throw Error("extension needs level n >= 1");
  const auto pre = check_n_elementary(ctx, map, n);
  if (!pre.ok) throw NotElementary("map is not n-elementary: " + pre.violation);
  if (side == Side::left ? map.image(fresh).has_value()
                         : map.preimage(fresh).has_value())
    throw Error("vertex is already mapped");

  ExtendResult result;
  if (side == Side::left) {
    result = detail::duplicator_extend_left(ctx, map, n, fresh);
  } else {
    GameContext swapped{ctx.right, ctx.left, ctx.check_budget};
    ExtendResult mirrored =
        detail::duplicator_extend_left(swapped, map.transposed(), n, fresh);
    result.found = mirrored.found;
    result.note = mirrored.note;
    if (mirrored.found) {
      result.partner = mirrored.partner;
      result.map = mirrored.map.transposed();
    }
  }
  if (result.found) {
    const auto post = check_n_elementary(ctx, result.map, n - 1);
    if (!post.ok) {
      result.found = false;
      result.note = "candidate failed re-verification: " + post.violation;
    }
  }
  return result;
}

struct RoundRecord {
  int round = 0;
  Side spoiler_side = Side::left;
  std::size_t spoiler_vertex = 0;
  std::size_t duplicator_vertex = 0;
  int verified_level = 0;
};

struct GameResult {
  bool win = false;
  bool aborted = false;
  int rounds_completed = 0;
  int final_level = 0;
  std::vector<RoundRecord> transcript;
  std::string failure;
};

/// Spoiler policy: picks (side, vertex) given the current map; may signal
/// abort with nullopt (interactive quit).
using SpoilerPolicy = std::function<std::optional<std::pair<Side, std::size_t>>(
    const GameContext&, const PartialMap&, int round, Rng&)>;

inline SpoilerPolicy random_spoiler() {
  return [](const GameContext& ctx, const PartialMap& map, int, Rng& rng)
             -> std::optional<std::pair<Side, std::size_t>> {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const Side side = rng.coin(0.5) ? Side::left : Side::right;
      const std::size_t v = rng.below(ctx.side(side).size());
      const bool taken = side == Side::left ? map.image(v).has_value()
                                            : map.preimage(v).has_value();
      if (!taken) return std::make_pair(side, v);
    }
    return std::make_pair(Side::left, std::size_t{0});
  };
}

/// Adversarial policy: picks the unmapped vertex whose bracketing arc in
/// the current shifted cloud is narrowest, squeezing Duplicator's options.
inline SpoilerPolicy boundary_spoiler() {
  return [](const GameContext& ctx, const PartialMap& map, int round, Rng& rng)
             -> std::optional<std::pair<Side, std::size_t>> {
    if (map.size() == 0) return random_spoiler()(ctx, map, round, rng);
    const long bound = 1L << 4;
    Side best_side = Side::left;
    std::size_t best_v = 0;
    double best_width = std::numeric_limits<double>::infinity();
    for (Side side : {Side::left, Side::right}) {
      const GameSide& gs = ctx.side(side);
      const auto& space = *gs.graph().space;
      std::vector<double> cloud;
      for (const auto& pr : map.pairs) {
        const std::size_t v = side == Side::left ? pr.first : pr.second;
        for (long z = -bound; z <= bound; ++z)
          cloud.push_back(space.reduce(gs.position(v) + double(z)));
      }
      std::sort(cloud.begin(), cloud.end());
      for (std::size_t v = 0; v < gs.size(); ++v) {
        const bool taken = side == Side::left ? map.image(v).has_value()
                                              : map.preimage(v).has_value();
        if (taken) continue;
        const double p = gs.position(v);
        auto it = std::upper_bound(cloud.begin(), cloud.end(), p);
        const double hi = it == cloud.end() ? cloud.front() : *it;
        const double lo = it == cloud.begin() ? cloud.back() : *(it - 1);
        const double width = space.reduce(hi - lo);
        if (width < best_width) {
          best_width = width;
          best_side = side;
          best_v = v;
        }
      }
    }
    return std::make_pair(best_side, best_v);
  };
}

/// Plays `rounds` rounds starting from the empty map at level m + rounds.
/// After round k the map is verified (m + rounds - k)-elementary; the game
/// is won when all rounds complete.
inline GameResult play(const GameContext& ctx, int rounds, int m,
                       const SpoilerPolicy& spoiler, std::uint64_t seed) {
  if (rounds < 1) throw Error("need at least one round");
  if (m < 0) throw Error("level exponent must be non-negative");
  GameResult result;
  PartialMap map;
  Rng rng = substream(seed, stream::kGame);
  for (int round = 1; round <= rounds; ++round) {
    const int level_before = m + rounds - (round - 1);
    auto move = spoiler(ctx, map, round, rng);
    if (!move) {
      result.aborted = true;
      result.failure = "aborted by spoiler";
      return result;
    }
    auto [side, v] = *move;
    RoundRecord rec;
    rec.round = round;
    rec.spoiler_side = side;
    rec.spoiler_vertex = v;
    const auto existing =
        side == Side::left ? map.image(v) : map.preimage(v);
    if (existing) {
      rec.duplicator_vertex = *existing;
      rec.verified_level = level_before - 1;
    } else {
      auto ext = duplicator_extend(ctx, map, level_before, v, side);
      if (!ext.found) {
        result.failure = "round " + std::to_string(round) + ": " + ext.note;
        return result;
      }
      map = ext.map;
      rec.duplicator_vertex = ext.partner;
      rec.verified_level = level_before - 1;
    }
    result.transcript.push_back(rec);
    result.rounds_completed = round;
  }
  result.win = true;
  result.final_level = m;
  return result;
}

/// Terminal game: the human is Spoiler. Reads "1 <vertex>" or "2 <vertex>"
/// per round ("quit" aborts); malformed input re-prompts without using up
/// the round.
inline GameResult interactive_play(const GameContext& ctx, int rounds, int m,
                                   std::istream& in, std::ostream& out) {
  auto policy = [&](const GameContext&, const PartialMap& map, int round,
                    Rng&) -> std::optional<std::pair<Side, std::size_t>> {
    out << "round " << round << "; current map:";
    if (map.size() == 0) out << " (empty)";
    for (auto [a, b] : map.pairs) out << " " << a << "->" << b;
    out << "\n";
    std::string line;
    while (true) {
      out << "spoiler> " << std::flush;
      if (!std::getline(in, line)) return std::nullopt;
      std::istringstream parse(line);
      std::string head;
      parse >> head;
      if (head == "quit") return std::nullopt;
      std::size_t v;
      if ((head == "1" || head == "2") && (parse >> v)) {
        const Side side = head == "1" ? Side::left : Side::right;
        if (v < ctx.side(side).size()) {
          const bool taken = side == Side::left ? map.image(v).has_value()
                                                : map.preimage(v).has_value();
          if (!taken) return std::make_pair(side, v);
          out << "vertex already mapped; pick another\n";
          continue;
        }
      }
      out << "expected: <1|2> <vertex-index>, or quit\n";
    }
  };
  GameResult result = play(ctx, rounds, m, policy, 0);
  for (const auto& rec : result.transcript)
    out << "duplicator answers " << rec.duplicator_vertex << " (level "
        << rec.verified_level << " verified)\n";
  out << (result.win ? "duplicator wins\n"
                     : (result.aborted ? "game aborted\n" : result.failure + "\n"));
  return result;
}

}  // namespace grg::ef
