#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "grg/errors.hpp"
#include "grg/rational.hpp"

namespace grg {

enum class SpaceKind { circle, sphere, flat_torus, box, finite };

/// A point of some space; the arity and interpretation of the coordinate
/// tuple are fixed by the owning SpaceDescriptor. Comparison is exact:
/// points are generated, never computed, so no tolerance is involved.
struct Point {
  std::vector<double> x;

  bool operator==(const Point& o) const { return x == o.x; }
};

struct CircleOffsets {
  double d1, d2;  // b = a + d1, c = a + d2 (mod L), both in [0, L)
  Point e;        // a + (d2 - d1)
};

/// Parametric metric space: circle of length L, sphere of radius r with the
/// geodesic metric, flat torus, axis box, or a finite rational metric space.
/// The first three carry a canonical uniform measure; the box and finite
/// kinds refuse all measure operations.
class SpaceDescriptor {
 public:
  static SpaceDescriptor circle(double length) {
    require(length > 0, "circle length must be positive");
    SpaceDescriptor s(SpaceKind::circle);
    s.params_ = {length};
    return s;
  }

  static SpaceDescriptor sphere(double radius) {
    require(radius > 0, "sphere radius must be positive");
    SpaceDescriptor s(SpaceKind::sphere);
    s.params_ = {radius};
    return s;
  }

  static SpaceDescriptor flat_torus(double l1, double l2) {
    require(l1 > 0 && l2 > 0, "torus side lengths must be positive");
    SpaceDescriptor s(SpaceKind::flat_torus);
    s.params_ = {l1, l2};
    return s;
  }

  static SpaceDescriptor box(std::vector<double> sides) {
    require(!sides.empty(), "box needs at least one side");
    for (double l : sides) require(l > 0, "box side lengths must be positive");
    SpaceDescriptor s(SpaceKind::box);
    s.params_ = std::move(sides);
    return s;
  }

  static SpaceDescriptor finite(std::shared_ptr<const RationalMetricSpace> m) {
    require(m != nullptr && m->size() > 0, "finite space must be non-empty");
    SpaceDescriptor s(SpaceKind::finite);
    s.finite_ = std::move(m);
    return s;
  }

  SpaceKind kind() const { return kind_; }
  double circle_length() const { return params_[0]; }
  double sphere_radius() const { return params_[0]; }
  const std::vector<double>& box_sides() const { return params_; }
  double torus_l1() const { return params_[0]; }
  double torus_l2() const { return params_[1]; }
  const RationalMetricSpace& finite_space() const { return *finite_; }
  std::shared_ptr<const RationalMetricSpace> finite_ptr() const { return finite_; }

  /// Coordinate arity of points.
  std::size_t arity() const {
    switch (kind_) {
      case SpaceKind::circle: return 1;
      case SpaceKind::sphere: return 3;
      case SpaceKind::flat_torus: return 2;
      case SpaceKind::box: return params_.size();
      case SpaceKind::finite: return 1;
    }
    return 0;
  }

  /// Canonicalizing point factory: circle residues reduced to [0, L),
  /// sphere vectors renormalized to norm r, range checks elsewhere.
  Point point(std::vector<double> coords) const {
    if (coords.size() != arity())
      throw MismatchedSpace("point arity does not match space");
    switch (kind_) {
      case SpaceKind::circle:
        coords[0] = reduce(coords[0]);
        break;
      case SpaceKind::sphere: {
        const double r = params_[0];
        double norm = std::sqrt(coords[0] * coords[0] + coords[1] * coords[1] +
                                coords[2] * coords[2]);
        if (norm <= 0) throw MismatchedSpace("zero vector is not on the sphere");
        for (double& c : coords) c *= r / norm;
        break;
      }
      case SpaceKind::flat_torus:
        coords[0] = reduce_mod(coords[0], params_[0]);
        coords[1] = reduce_mod(coords[1], params_[1]);
        break;
      case SpaceKind::box:
        for (std::size_t i = 0; i < coords.size(); ++i)
          if (coords[i] < 0 || coords[i] > params_[i])
            throw MismatchedSpace("box point out of range");
        break;
      case SpaceKind::finite: {
        const double idx = coords[0];
        if (idx != std::floor(idx) || idx < 0 || idx >= double(finite_->size()))
          throw MismatchedSpace("finite point must be a valid index");
        break;
      }
    }
    return Point{std::move(coords)};
  }

  void check_point(const Point& p) const {
    if (p.x.size() != arity())
      throw MismatchedSpace("point arity does not match space");
    switch (kind_) {
      case SpaceKind::circle:
        if (p.x[0] < 0 || p.x[0] >= params_[0])
          throw MismatchedSpace("circle residue out of [0, L)");
        break;
      case SpaceKind::sphere: {
        const double r = params_[0];
        double norm = std::sqrt(p.x[0] * p.x[0] + p.x[1] * p.x[1] + p.x[2] * p.x[2]);
        if (std::abs(norm - r) > 1e-9 * r)
          throw MismatchedSpace("sphere point has wrong norm");
        break;
      }
      case SpaceKind::flat_torus:
        if (p.x[0] < 0 || p.x[0] >= params_[0] || p.x[1] < 0 || p.x[1] >= params_[1])
          throw MismatchedSpace("torus point out of range");
        break;
      case SpaceKind::box:
        for (std::size_t i = 0; i < p.x.size(); ++i)
          if (p.x[i] < 0 || p.x[i] > params_[i])
            throw MismatchedSpace("box point out of range");
        break;
      case SpaceKind::finite:
        if (p.x[0] != std::floor(p.x[0]) || p.x[0] < 0 ||
            p.x[0] >= double(finite_->size()))
          throw MismatchedSpace("finite point must be a valid index");
        break;
    }
  }

  double distance(const Point& p, const Point& q) const {
    check_point(p);
    check_point(q);
    switch (kind_) {
      case SpaceKind::circle: {
        const double l = params_[0];
        const double diff = std::abs(p.x[0] - q.x[0]);
        return std::min(diff, l - diff);
      }
      case SpaceKind::sphere: {
        // Two-argument arctangent form: stable near coincident and
        // antipodal pairs, unlike acos of the normalized dot product.
        const double r = params_[0];
        const double dot = p.x[0] * q.x[0] + p.x[1] * q.x[1] + p.x[2] * q.x[2];
        const double cx = p.x[1] * q.x[2] - p.x[2] * q.x[1];
        const double cy = p.x[2] * q.x[0] - p.x[0] * q.x[2];
        const double cz = p.x[0] * q.x[1] - p.x[1] * q.x[0];
        const double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
        return r * std::atan2(cross, dot);
      }
      case SpaceKind::flat_torus: {
        const double dx = wrap_diff(p.x[0], q.x[0], params_[0]);
        const double dy = wrap_diff(p.x[1], q.x[1], params_[1]);
        return std::sqrt(dx * dx + dy * dy);
      }
      case SpaceKind::box: {
        double s = 0;
        for (std::size_t i = 0; i < p.x.size(); ++i) {
          const double d = p.x[i] - q.x[i];
          s += d * d;
        }
        return std::sqrt(s);
      }
      case SpaceKind::finite:
        return rat_double(finite_->dist(std::size_t(p.x[0]), std::size_t(q.x[0])));
    }
    return 0;
  }

  /// Circular order C(a,b,c) on a circle: the residues appear in one of the
  /// three forward rotations a<b<c, b<c<a, c<a<b.
  bool circular_order(const Point& a, const Point& b, const Point& c) const {
    require_circle();
    check_point(a);
    check_point(b);
    check_point(c);
    const double x = a.x[0], y = b.x[0], z = c.x[0];
    if (x == y || y == z || x == z)
      throw DegenerateTriple("circular order needs pairwise distinct points");
    return (x < y && y < z) || (y < z && z < x) || (z < x && x < y);
  }

  /// Group shift a + z on the circle, reduced back to [0, L).
  Point shift(const Point& a, double z) const {
    require_circle();
    check_point(a);
    return Point{{reduce(a.x[0] + z)}};
  }

  /// Offsets d1, d2 with b = a+d1, c = a+d2 and the auxiliary point
  /// e = a + (d2 - d1). C(a,b,c), 0 < d1 < d2 and C(a,e,c) are equivalent.
  CircleOffsets lemma_offsets(const Point& a, const Point& b, const Point& c) const {
    require_circle();
    check_point(a);
    check_point(b);
    check_point(c);
    if (a == b || b == c || a == c)
      throw DegenerateTriple("offsets need pairwise distinct points");
    const double d1 = reduce(b.x[0] - a.x[0]);
    const double d2 = reduce(c.x[0] - a.x[0]);
    return CircleOffsets{d1, d2, shift(a, d2 - d1)};
  }

  /// Mass of a ball of the given radius under the canonical uniform
  /// measure (arc length, area). Independent of the centre.
  double ball_measure(double radius) const {
    require(radius > 0, "ball radius must be positive");
    switch (kind_) {
      case SpaceKind::circle:
        return std::min(2 * radius, params_[0]);
      case SpaceKind::sphere: {
        const double r = params_[0];
        if (radius >= std::numbers::pi * r) return 4 * std::numbers::pi * r * r;
        return 2 * std::numbers::pi * r * r * (1 - std::cos(radius / r));
      }
      case SpaceKind::flat_torus:
        // A ball around the origin unfolds to four congruent corner pieces.
        return 4 * corner_disc_area(params_[0] / 2, params_[1] / 2, radius);
      case SpaceKind::box:
      case SpaceKind::finite:
        throw NotUniform("space has no uniformly distributed measure");
    }
    return 0;
  }

  double total_measure() const {
    switch (kind_) {
      case SpaceKind::circle: return params_[0];
      case SpaceKind::sphere:
        return 4 * std::numbers::pi * params_[0] * params_[0];
      case SpaceKind::flat_torus: return params_[0] * params_[1];
      case SpaceKind::box:
      case SpaceKind::finite:
        throw NotUniform("space has no uniformly distributed measure");
    }
    return 0;
  }

  /// Total mass divided by unit-ball mass.
  double ball_volume_ratio() const { return total_measure() / ball_measure(1.0); }

  bool is_uniform() const {
    return kind_ == SpaceKind::circle || kind_ == SpaceKind::sphere ||
           kind_ == SpaceKind::flat_torus;
  }

  double diameter() const {
    switch (kind_) {
      case SpaceKind::circle: return params_[0] / 2;
      case SpaceKind::sphere: return std::numbers::pi * params_[0];
      case SpaceKind::flat_torus: {
        const double a = params_[0] / 2, b = params_[1] / 2;
        return std::sqrt(a * a + b * b);
      }
      case SpaceKind::box: {
        double s = 0;
        for (double l : params_) s += l * l;
        return std::sqrt(s);
      }
      case SpaceKind::finite: {
        return rat_double(finite_->diameter());
      }
    }
    return 0;
  }

  double reduce(double x) const {
    require_circle();
    return reduce_mod(x, params_[0]);
  }

  bool operator==(const SpaceDescriptor& o) const {
    if (kind_ != o.kind_ || params_ != o.params_) return false;
    if (kind_ != SpaceKind::finite) return true;
    return finite_ == o.finite_ ||
           (finite_ && o.finite_ && finite_->labels == o.finite_->labels &&
            finite_->d == o.finite_->d);
  }

 private:
  explicit SpaceDescriptor(SpaceKind k) : kind_(k) {}

  static void require(bool ok, const char* msg) {
    if (!ok) throw Error(msg);
  }

  void require_circle() const {
    if (kind_ != SpaceKind::circle)
      throw MismatchedSpace("operation requires a circle");
  }

  static double reduce_mod(double x, double l) {
    double r = std::fmod(x, l);
    if (r < 0) r += l;
    if (r >= l) r -= l;  // fmod can round up to l
    if (r < 0) r = 0;
    return r;
  }

  static double wrap_diff(double a, double b, double l) {
    const double d = std::abs(a - b);
    return std::min(d, l - d);
  }

  /// Area of {(u,v) in [0,a]x[0,b] : u^2+v^2 < rho^2}.
  static double corner_disc_area(double a, double b, double rho) {
    if (rho * rho >= a * a + b * b) return a * b;
    auto seg = [&](double u) {
      // integral of sqrt(rho^2 - u^2)
      return 0.5 * (u * std::sqrt(std::max(rho * rho - u * u, 0.0)) +
                    rho * rho * std::asin(std::min(1.0, u / rho)));
    };
    const double ustar = std::sqrt(std::max(rho * rho - b * b, 0.0));
    const double uhi = std::min(a, rho);
    double area = b * std::min(ustar, a);
    if (uhi > ustar) area += seg(uhi) - seg(ustar);
    return area;
  }

  SpaceKind kind_;
  std::vector<double> params_;
  std::shared_ptr<const RationalMetricSpace> finite_;
};

}  // namespace grg
