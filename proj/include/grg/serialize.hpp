#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "grg/errors.hpp"
#include "grg/graph.hpp"
#include "grg/rational.hpp"
#include "grg/sample.hpp"
#include "grg/space.hpp"

namespace grg {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

inline Json space_to_json(const SpaceDescriptor& s) {
  Json j;
  switch (s.kind()) {
    case SpaceKind::circle:
      j["kind"] = "circle";
      j["L"] = s.circle_length();
      break;
    case SpaceKind::sphere:
      j["kind"] = "sphere";
      j["r"] = s.sphere_radius();
      break;
    case SpaceKind::flat_torus:
      j["kind"] = "flat_torus";
      j["L1"] = s.torus_l1();
      j["L2"] = s.torus_l2();
      break;
    case SpaceKind::box:
      j["kind"] = "box";
      j["sides"] = s.box_sides();
      break;
    case SpaceKind::finite: {
      j["kind"] = "finite";
      const auto& m = s.finite_space();
      Json sp;
      sp["labels"] = m.labels;
      Json rows = Json::array();
      for (const auto& row : m.d) {
        Json r = Json::array();
        for (const auto& v : row) r.push_back(rat_string(v));
        rows.push_back(std::move(r));
      }
      sp["distances"] = std::move(rows);
      j["space"] = std::move(sp);
      break;
    }
  }
  return j;
}

inline RationalMetricSpace rational_space_from_json(const Json& j) {
  RationalMetricSpace m;
  m.labels = j.at("labels").get<std::vector<std::string>>();
  for (const auto& row : j.at("distances")) {
    std::vector<Rat> r;
    for (const auto& v : row) r.push_back(rat_parse(v.get<std::string>()));
    m.d.push_back(std::move(r));
  }
  if (m.d.size() != m.labels.size())
    throw Error("rational space: distance matrix size mismatch");
  for (const auto& row : m.d)
    if (row.size() != m.labels.size())
      throw Error("rational space: distance matrix is not square");
  return m;
}

inline Json rational_space_to_json(const RationalMetricSpace& m) {
  Json j = space_to_json(SpaceDescriptor::finite(
      std::make_shared<RationalMetricSpace>(m)));
  return j.at("space");
}

inline SpaceDescriptor space_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "circle") return SpaceDescriptor::circle(j.at("L").get<double>());
  if (kind == "sphere") return SpaceDescriptor::sphere(j.at("r").get<double>());
  if (kind == "flat_torus")
    return SpaceDescriptor::flat_torus(j.at("L1").get<double>(),
                                       j.at("L2").get<double>());
  if (kind == "box")
    return SpaceDescriptor::box(j.at("sides").get<std::vector<double>>());
  if (kind == "finite")
    return SpaceDescriptor::finite(std::make_shared<RationalMetricSpace>(
        rational_space_from_json(j.at("space"))));
  throw Error("unknown space kind: " + kind);
}

inline Json sample_to_json(const SampleSet& s) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["space"] = space_to_json(s.space);
  j["config"] = {{"n", s.config.n},
                 {"seed", s.config.seed},
                 {"integer_margin", s.config.integer_margin},
                 {"max_rejections", s.config.max_rejections}};
  Json pts = Json::array();
  for (const Point& p : s.points) pts.push_back(p.x);
  j["points"] = std::move(pts);
  return j;
}

inline SampleSet sample_from_json(const Json& j) {
  SampleSet s{space_from_json(j.at("space")), {}, {}};
  const Json& c = j.at("config");
  s.config.n = c.at("n").get<std::size_t>();
  s.config.seed = c.at("seed").get<std::uint64_t>();
  s.config.integer_margin = c.at("integer_margin").get<double>();
  s.config.max_rejections = c.at("max_rejections").get<std::size_t>();
  for (const auto& p : j.at("points"))
    s.points.push_back(Point{p.get<std::vector<double>>()});
  return s;
}

inline Json graph_to_json(const GeoGraph& g) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["n"] = g.size();
  j["p"] = g.p ? Json(*g.p) : Json(nullptr);
  j["seed"] = g.seed ? Json(*g.seed) : Json(nullptr);
  j["integer_margin"] = g.integer_margin ? Json(*g.integer_margin) : Json(nullptr);
  if (g.space) j["space"] = space_to_json(*g.space);
  if (g.coords) {
    Json pts = Json::array();
    for (const Point& p : *g.coords) pts.push_back(p.x);
    j["coords"] = std::move(pts);
  }
  Json edges = Json::array();
  for (std::size_t u = 0; u < g.size(); ++u)
    g.adj[u].for_each([&](std::size_t v) {
      if (u < v) edges.push_back(Json::array({u, v}));
    });
  j["edges"] = std::move(edges);
  return j;
}

inline GeoGraph graph_from_json(const Json& j, bool validate = true) {
  GeoGraph g;
  const std::size_t n = j.at("n").get<std::size_t>();
  g.adj.assign(n, DynBitset(n));
  if (j.contains("p") && !j.at("p").is_null()) g.p = j.at("p").get<double>();
  if (j.contains("seed") && !j.at("seed").is_null())
    g.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("integer_margin") && !j.at("integer_margin").is_null())
    g.integer_margin = j.at("integer_margin").get<double>();
  if (j.contains("space")) g.space = space_from_json(j.at("space"));
  if (j.contains("coords")) {
    std::vector<Point> pts;
    for (const auto& p : j.at("coords"))
      pts.push_back(Point{p.get<std::vector<double>>()});
    if (pts.size() != n) throw Error("graph file: coords size mismatch");
    g.coords = std::move(pts);
  }
  for (const auto& e : j.at("edges")) {
    const std::size_t u = e.at(0).get<std::size_t>();
    const std::size_t v = e.at(1).get<std::size_t>();
    if (u >= n || v >= n) throw Error("graph file: edge endpoint out of range");
    if (u == v) throw Error("graph file: self-loop");
    g.adj[u].set(v);
    g.adj[v].set(u);
  }
  if (validate && g.space && g.coords) {
    for (std::size_t u = 0; u < n; ++u) {
      bool bad = false;
      g.adj[u].for_each([&](std::size_t v) {
        if (u < v && g.dist(u, v) >= 1.0) bad = true;
      });
      if (bad) throw Error("graph file: edge violates the unit threshold");
    }
  }
  return g;
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open for reading: " + path);
  Json j;
  in >> j;
  return j;
}

inline void save_graph(const GeoGraph& g, const std::string& path) {
  write_json_file(path, graph_to_json(g));
}

inline GeoGraph load_graph(const std::string& path, bool validate = true) {
  return graph_from_json(read_json_file(path), validate);
}

}  // namespace grg
