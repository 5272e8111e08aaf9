#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "grg/errors.hpp"
#include "grg/rng.hpp"
#include "grg/space.hpp"

namespace grg {

struct SampleConfig {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  /// Pairwise distances must differ from every integer by more than this.
  double integer_margin = 1e-3;
  /// Bound on the total number of rejected candidates across the whole run.
  std::size_t max_rejections = 0;  // 0 = default: 1000 + 200 * n

  std::size_t rejection_budget() const {
    return max_rejections ? max_rejections : 1000 + 200 * n;
  }
};

struct SampleSet {
  SpaceDescriptor space;
  std::vector<Point> points;
  SampleConfig config;

  std::size_t size() const { return points.size(); }
};

/// One uniform draw from the space.
inline Point draw_uniform(const SpaceDescriptor& space, Rng& rng) {
  switch (space.kind()) {
    case SpaceKind::circle:
      return space.point({rng.uniform(0, space.circle_length())});
    case SpaceKind::sphere: {
      // (z, phi) parametrization: exactly uniform on the sphere.
      const double z = rng.uniform(-1, 1);
      const double phi = rng.uniform(0, 2 * std::numbers::pi);
      const double s = std::sqrt(std::max(0.0, 1 - z * z));
      const double r = space.sphere_radius();
      return space.point({r * s * std::cos(phi), r * s * std::sin(phi), r * z});
    }
    case SpaceKind::flat_torus:
      return space.point(
          {rng.uniform(0, space.torus_l1()), rng.uniform(0, space.torus_l2())});
    case SpaceKind::box: {
      std::vector<double> c;
      c.reserve(space.box_sides().size());
      for (double l : space.box_sides()) c.push_back(rng.uniform(0, l));
      return space.point(std::move(c));
    }
    case SpaceKind::finite:
      throw NotApplicable("uniform sampling is defined for continuous kinds");
  }
  throw NotApplicable("unreachable");
}

inline bool integer_margin_ok(double d, double margin) {
  return std::abs(d - std::round(d)) > margin;
}

/// Draws n i.i.d. uniform points, rejecting any candidate whose distance to
/// an already accepted point is within `integer_margin` of an integer
/// (margin 0 still rejects exact duplicates). Each point has a dedicated
/// substream, so a rejection re-draws only the offending point and the rest
/// of the stream is unaffected.
inline SampleSet sample_iid(const SpaceDescriptor& space,
                            const SampleConfig& config) {
  if (!(config.integer_margin >= 0 && config.integer_margin < 0.5))
    throw Error("integer margin must lie in [0, 1/2)");
  if (space.kind() == SpaceKind::box || space.kind() == SpaceKind::finite) {
    if (space.kind() == SpaceKind::finite)
      throw NotApplicable("cannot sample a finite space uniformly");
  }
  SampleSet out{space, {}, config};
  out.points.reserve(config.n);
  std::size_t rejections = 0;
  const std::size_t budget = config.rejection_budget();
  for (std::size_t i = 0; i < config.n; ++i) {
    Rng rng = substream(config.seed, stream::kSamplePoint, i);
    while (true) {
      Point cand = draw_uniform(space, rng);
      bool ok = true;
      for (const Point& q : out.points) {
        if (!integer_margin_ok(space.distance(cand, q), config.integer_margin)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        out.points.push_back(std::move(cand));
        break;
      }
      if (++rejections > budget)
        throw RejectionBudgetExceeded(
            "rejection budget exhausted; integer margin too large for n");
    }
  }
  return out;
}

/// Empirical density diagnostic: max over uniform probe points of the
/// distance to the nearest sample point.
inline double covering_radius(const SampleSet& sample, std::size_t probe_count,
                              std::uint64_t probe_seed) {
  if (sample.points.empty()) throw EmptySample("covering radius of empty sample");
  Rng rng = substream(probe_seed, stream::kProbe);
  double worst = 0;
  for (std::size_t i = 0; i < probe_count; ++i) {
    Point probe = draw_uniform(sample.space, rng);
    double best = std::numeric_limits<double>::infinity();
    for (const Point& q : sample.points)
      best = std::min(best, sample.space.distance(probe, q));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace grg
