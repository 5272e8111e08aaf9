#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <vector>

#include "grg/errors.hpp"

namespace grg {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline BigInt rat_num(const Rat& r) { return numerator(r); }
inline BigInt rat_den(const Rat& r) { return denominator(r); }

inline bool rat_is_integer(const Rat& r) { return rat_den(r) == 1; }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

/// Smallest integer >= r.
inline BigInt rat_ceil(const Rat& r) {
  BigInt q = rat_num(r) / rat_den(r);
  if (rat_num(r) > 0 && rat_num(r) % rat_den(r) != 0) ++q;
  return q;
}

inline BigInt rat_floor(const Rat& r) {
  BigInt q = rat_num(r) / rat_den(r);
  if (rat_num(r) < 0 && rat_num(r) % rat_den(r) != 0) --q;
  return q;
}

inline double rat_double(const Rat& r) { return r.convert_to<double>(); }

/// "p/q" (or "p" for integers), exact.
inline std::string rat_string(const Rat& r) {
  std::string s = rat_num(r).str();
  if (!rat_is_integer(r)) s += "/" + rat_den(r).str();
  return s;
}

inline Rat rat_parse(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw Error("rational with zero denominator: " + s);
    return Rat(num, den);
  } catch (const std::exception&) {
    throw Error("cannot parse rational: " + s);
  }
}

/// Finite metric space with exact rational distances. The matrix is kept
/// dense and symmetric; labels are for I/O and diagnostics only.
struct RationalMetricSpace {
  std::vector<std::string> labels;
  std::vector<std::vector<Rat>> d;

  std::size_t size() const { return labels.size(); }

  const Rat& dist(std::size_t i, std::size_t j) const { return d[i][j]; }

  std::optional<std::size_t> index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return i;
    return std::nullopt;
  }

  /// Appends a point at the given distances (one per existing point).
  std::size_t add_point(const std::string& label,
                        const std::vector<Rat>& dist_to_existing) {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) d[i].push_back(dist_to_existing[i]);
    std::vector<Rat> row = dist_to_existing;
    row.push_back(Rat(0));
    d.push_back(std::move(row));
    labels.push_back(label);
    return n;
  }

  Rat diameter() const {
    Rat m(0);
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j)
        if (d[i][j] > m) m = d[i][j];
    return m;
  }
};

struct MetricViolation {
  enum class Kind { diagonal, symmetry, positivity, triangle, integer_distance };
  Kind kind;
  std::size_t i = 0, j = 0, k = 0;
};

/// Exact check of all metric axioms; with require_integer_free also flags
/// pairs at exactly integer distance. Violations are data, not errors.
inline std::vector<MetricViolation> validate_metric(
    const RationalMetricSpace& s, bool require_integer_free = false) {
  std::vector<MetricViolation> out;
  const std::size_t n = s.size();
  using K = MetricViolation::Kind;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.d[i][i] != 0) out.push_back({K::diagonal, i, i, 0});
    for (std::size_t j = i + 1; j < n; ++j) {
      if (s.d[i][j] != s.d[j][i]) out.push_back({K::symmetry, i, j, 0});
      if (s.d[i][j] <= 0) out.push_back({K::positivity, i, j, 0});
      if (require_integer_free && rat_is_integer(s.d[i][j]))
        out.push_back({K::integer_distance, i, j, 0});
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (s.d[i][j] > s.d[i][k] + s.d[k][j])
          out.push_back({K::triangle, i, j, k});
      }
  return out;
}

}  // namespace grg
