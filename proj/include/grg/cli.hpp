#pragma once

// Command-line driver: generation, analysis, games, the exact extension
// suite and the acceptance harness, all reading and writing the JSON file
// formats owned by the individual modules.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "grg/acceptance.hpp"
#include "grg/alpha.hpp"
#include "grg/efgame.hpp"
#include "grg/gec.hpp"
#include "grg/logic.hpp"
#include "grg/recovery.hpp"
#include "grg/serialize.hpp"
#include "grg/urysohn.hpp"

namespace grg::cli {

struct SpaceOptions {
  std::string kind = "circle";
  double length = 5.0;
  double radius = 1.0;
  double l1 = 4.0, l2 = 3.0;

  SpaceDescriptor build() const {
    if (kind == "circle") return SpaceDescriptor::circle(length);
    if (kind == "sphere") return SpaceDescriptor::sphere(radius);
    if (kind == "flat_torus") return SpaceDescriptor::flat_torus(l1, l2);
    throw Error("unsupported space kind for sampling: " + kind);
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--space", kind, "space kind: circle|sphere|flat_torus")
        ->capture_default_str();
    cmd->add_option("--L", length, "circle length")->capture_default_str();
    cmd->add_option("--r", radius, "sphere radius")->capture_default_str();
    cmd->add_option("--L1", l1, "torus first side")->capture_default_str();
    cmd->add_option("--L2", l2, "torus second side")->capture_default_str();
  }
};

inline Json effective_config(const CLI::App* cmd) {
  Json cfg;
  for (const auto* opt : cmd->get_options()) {
    if (opt->get_name().empty() || opt->get_name() == "--help") continue;
    if (!opt->reduced_results().empty() || !opt->get_default_str().empty()) {
      std::string joined;
      for (const auto& r : opt->reduced_results())
        joined += (joined.empty() ? "" : ",") + r;
      cfg[opt->get_name()] = joined.empty() ? opt->get_default_str() : joined;
    }
  }
  return cfg;
}

inline void emit(const Json& payload, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << payload.dump(2) << "\n";
  else
    write_json_file(path, payload);
}

inline Json metric_graph_to_json(const urysohn::MetricGraph& g) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["space"] = rational_space_to_json(g.space);
  j["p"] = g.p;
  j["seed"] = g.coin_seed;
  Json edges = Json::array();
  for (std::size_t u = 0; u < g.size(); ++u)
    g.adj[u].for_each([&](std::size_t v) {
      if (u < v) edges.push_back(Json::array({u, v}));
    });
  j["edges"] = std::move(edges);
  return j;
}

inline urysohn::MetricGraph metric_graph_from_json(const Json& j) {
  urysohn::MetricGraph g;
  g.space = rational_space_from_json(j.at("space"));
  g.p = j.value("p", 0.5);
  g.coin_seed = j.value("seed", std::uint64_t{0});
  g.adj.assign(g.size(), DynBitset(g.size()));
  for (const auto& e : j.at("edges")) {
    const std::size_t u = e.at(0).get<std::size_t>();
    const std::size_t v = e.at(1).get<std::size_t>();
    if (g.space.dist(u, v) >= 1)
      throw Error("metric graph edge violates the unit threshold");
    g.adj[u].set(v);
    g.adj[v].set(u);
  }
  return g;
}

inline Json band_map_to_json(const urysohn::BandMap& m) {
  Json pairs = Json::array();
  for (auto [a, b] : m.pairs) pairs.push_back(Json::array({a, b}));
  return Json{{"pairs", std::move(pairs)}};
}

inline urysohn::BandMap band_map_from_json(const Json& j) {
  urysohn::BandMap m;
  for (const auto& p : j.at("pairs"))
    m.pairs.emplace_back(p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>());
  return m;
}

inline int run(std::vector<std::string> args) {
  CLI::App app{"geometric random graph toolkit"};
  app.set_config("--config", "", "key = value config file; flags override");
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "worker parallelism cap");
  app.require_subcommand(1);

  int exit_code = 0;

  // ---- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "sample a space and generate a graph");
  SpaceOptions gen_space;
  gen_space.attach(gen);
  std::size_t gen_n = 1000;
  double gen_p = 0.5;
  std::uint64_t gen_seed = 1;
  double gen_margin = -1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of vertices")->capture_default_str();
  gen->add_option("--p", gen_p, "edge probability")->capture_default_str();
  gen->add_option("--seed", gen_seed, "seed for sampling and edges")
      ->capture_default_str();
  gen->add_option("--margin", gen_margin,
                  "integer-distance margin (default 0.05/n)");
  gen->add_option("-o,--out", gen_out, "output graph file")->required();
  gen->callback([&] {
    SampleConfig cfg{gen_n, gen_seed,
                     gen_margin >= 0 ? gen_margin : 0.05 / double(gen_n)};
    auto sample = sample_iid(gen_space.build(), cfg);
    auto g = generate(sample, gen_p, gen_seed + 1);
    Json j = graph_to_json(g);
    j["config"] = effective_config(gen);
    emit(j, gen_out);
  });

  // ---- sample ------------------------------------------------------------
  auto* smp = app.add_subcommand("sample", "sample a vertex set only");
  SpaceOptions smp_space;
  smp_space.attach(smp);
  std::size_t smp_n = 1000;
  std::uint64_t smp_seed = 1;
  double smp_margin = -1;
  std::string smp_out;
  smp->add_option("--n", smp_n, "number of points")->capture_default_str();
  smp->add_option("--seed", smp_seed, "sampling seed")->capture_default_str();
  smp->add_option("--margin", smp_margin,
                  "integer-distance margin (default 0.05/n)");
  smp->add_option("-o,--out", smp_out, "output sample file")->required();
  smp->callback([&] {
    SampleConfig cfg{smp_n, smp_seed,
                     smp_margin >= 0 ? smp_margin : 0.05 / double(smp_n)};
    auto sample = sample_iid(smp_space.build(), cfg);
    emit(sample_to_json(sample), smp_out);
  });

  // ---- alpha -------------------------------------------------------------
  auto* alp = app.add_subcommand("alpha", "estimate the capture invariant");
  std::string alp_graph, alp_out, alp_csv;
  std::vector<std::size_t> alp_sizes{200, 500};
  std::vector<double> alp_deltas{0.05};
  std::uint64_t alp_seed = 1;
  std::size_t alp_max_n = 0;
  alp->add_option("--graph", alp_graph, "input graph file")->required();
  alp->add_option("--sizes", alp_sizes, "witness set sizes")->delimiter(',');
  alp->add_option("--deltas", alp_deltas, "snap radii")->delimiter(',');
  alp->add_option("--seed", alp_seed, "witness seed")->capture_default_str();
  alp->add_option("--sentences-max-n", alp_max_n,
                  "also run the exact sentence scan up to this size");
  alp->add_option("-o,--out", alp_out, "output report file");
  alp->add_option("--csv", alp_csv, "per-size estimates as CSV");
  alp->callback([&] {
    auto g = load_graph(alp_graph);
    auto report = alpha_estimate(g, alp_sizes, alp_deltas, alp_seed);
    Json j;
    j["format_version"] = kFormatVersion;
    j["config"] = effective_config(alp);
    j["estimate"] = report.estimate;
    j["theoretical"] = report.theoretical ? Json(*report.theoretical) : Json(nullptr);
    Json sets = Json::array();
    for (const auto& s : report.sets)
      sets.push_back({{"size", s.size},
                      {"delta", s.delta},
                      {"seed", s.seed},
                      {"snapped", s.snapped},
                      {"adjacency_upper", s.adjacency_upper},
                      {"ball_upper", s.ball_upper}});
    j["sets"] = std::move(sets);
    if (alp_max_n > 0) {
      Json sentences = Json::array();
      j["alpha_from_sentences"] = alpha_from_sentences(g, alp_max_n);
      j["sentences"] = std::move(sentences);
    }
    emit(j, alp_out);
    if (!alp_csv.empty()) {
      std::ofstream csv(alp_csv);
      csv << "size,delta,adjacency_upper,ball_upper\n";
      for (const auto& s : report.sets)
        csv << s.size << "," << s.delta << "," << s.adjacency_upper << ","
            << s.ball_upper << "\n";
    }
  });

  // ---- recover -----------------------------------------------------------
  auto* rec = app.add_subcommand("recover", "reconstruct structure from adjacency");
  std::string rec_graph, rec_out;
  std::uint64_t rec_seed = 1;
  std::size_t rec_triples = 2000, rec_probes = 200;
  rec->add_option("--graph", rec_graph, "input graph file")->required();
  rec->add_option("--seed", rec_seed, "search seed")->capture_default_str();
  rec->add_option("--triples", rec_triples, "order-agreement sample size")
      ->capture_default_str();
  rec->add_option("--probes", rec_probes, "translate probe count")
      ->capture_default_str();
  rec->add_option("-o,--out", rec_out, "output report file");
  rec->callback([&] {
    auto g = load_graph(rec_graph);
    auto bare = strip_coordinates(g);
    auto b = recovery::recover_unit_ball(bare);
    Json j;
    j["format_version"] = kFormatVersion;
    j["config"] = effective_config(rec);
    const bool oracle = g.has_coords();
    if (oracle) {
      std::size_t tested = 0, agree = 0;
      for (std::size_t u = 0; u < g.size(); ++u)
        for (std::size_t v = u + 1; v < g.size(); ++v) {
          const double d = g.dist(u, v);
          if (std::abs(d - 1.0) <= 0.05) continue;
          ++tested;
          if (b.rows[u].test(v) == (d < 1.0)) ++agree;
        }
      j["ball_relation"] = {{"offband_pairs", tested},
                            {"agreement", tested ? double(agree) / tested : 1.0}};
    }
    auto loop = recovery::find_orienting_loop(
        bare, recovery::LoopMode::adjacency_search, &b, rec_seed);
    j["loop"] = {{"arc_count", loop.arc_count()},
                 {"vertices", loop.vertices},
                 {"partition_defects", recovery::partition_defects(b, loop)}};
    if (oracle) {
      const auto& space = *g.space;
      if (!space.circular_order(g.coord(loop.at(0)), g.coord(loop.at(1)),
                                g.coord(loop.at(2))))
        std::reverse(loop.vertices.begin() + 1, loop.vertices.end());
      recovery::OrderReconstruction orec(b, loop);
      Rng rng = substream(rec_seed, stream::kProbe, 5);
      std::size_t tested = 0, agree = 0;
      while (tested < rec_triples) {
        const std::size_t x = rng.below(g.size());
        const std::size_t y = rng.below(g.size());
        const std::size_t z = rng.below(g.size());
        if (x == y || y == z || x == z) continue;
        if (std::min({g.dist(x, y), g.dist(y, z), g.dist(x, z)}) <= 0.05) continue;
        ++tested;
        if (orec.order(x, y, z) ==
            space.circular_order(g.coord(x), g.coord(y), g.coord(z)))
          ++agree;
      }
      std::vector<double> errors;
      for (std::size_t i = 0; i < rec_probes; ++i) {
        const std::size_t x = rng.below(g.size());
        auto t = orec.translate(x, 1);
        if (!t) continue;
        const double want = space.reduce(g.coord(x).x[0] + 1.0);
        const double got = g.coord(t->vertex).x[0];
        const double len = space.circle_length();
        errors.push_back(std::min(std::abs(got - want), len - std::abs(got - want)));
      }
      std::sort(errors.begin(), errors.end());
      auto quantile = [&](double q) {
        return errors.empty() ? 0.0
                              : errors[std::size_t(q * double(errors.size() - 1))];
      };
      j["order"] = {{"triples", tested},
                    {"agreement", tested ? double(agree) / tested : 1.0}};
      j["translate"] = {{"probes", errors.size()},
                        {"median_error", quantile(0.5)},
                        {"p90_error", quantile(0.9)},
                        {"p99_error", quantile(0.99)}};
    }
    emit(j, rec_out);
  });

  // ---- gec-probe ---------------------------------------------------------
  auto* gp = app.add_subcommand("gec-probe", "run existential-closure probes");
  std::string gp_graph, gp_out;
  GecScoreConfig gp_cfg;
  gp->add_option("--graph", gp_graph, "input graph file")->required();
  gp->add_option("--trials", gp_cfg.trials, "number of probes")
      ->capture_default_str();
  gp->add_option("--max-pattern", gp_cfg.max_pattern, "max |A|+|B|")
      ->capture_default_str();
  gp->add_option("--epsilon", gp_cfg.epsilon, "witness locality")
      ->capture_default_str();
  gp->add_option("--seed", gp_cfg.seed, "probe seed")->capture_default_str();
  gp->add_option("-o,--out", gp_out, "JSON-lines output (default stdout)");
  gp->callback([&] {
    auto g = load_graph(gp_graph);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!gp_out.empty() && gp_out != "-") {
      file.open(gp_out);
      if (!file) throw Error("cannot open " + gp_out);
      out = &file;
    }
    const double score = gec_trials(g, gp_cfg, [&](const GecTrialRecord& r) {
      Json line;
      line["s"] = r.probe.s;
      line["a"] = r.probe.a;
      line["b"] = r.probe.b;
      line["epsilon"] = r.probe.epsilon;
      line["witness"] = r.witness ? Json(*r.witness) : Json(nullptr);
      (*out) << line.dump() << "\n";
    });
    std::cerr << "score " << score << "\n";
  });

  // ---- ef ----------------------------------------------------------------
  auto* efc = app.add_subcommand("ef", "play back-and-forth games");
  std::string ef_g1, ef_g2, ef_out, ef_spoiler = "random";
  int ef_rounds = 3, ef_level = 1, ef_games = 1;
  std::uint64_t ef_seed = 1;
  bool ef_interactive = false;
  efc->add_option("--graph1", ef_g1, "left graph file")->required();
  efc->add_option("--graph2", ef_g2, "right graph file")->required();
  efc->add_option("--rounds", ef_rounds, "rounds per game")->capture_default_str();
  efc->add_option("--level", ef_level, "shift exponent(base level m)")
      ->capture_default_str();
  efc->add_option("--spoiler", ef_spoiler, "random|boundary")
      ->capture_default_str();
  efc->add_option("--games", ef_games, "number of games")->capture_default_str();
  efc->add_option("--seed", ef_seed, "game seed base")->capture_default_str();
  efc->add_flag("--interactive", ef_interactive, "human spoiler on the terminal");
  efc->add_option("-o,--out", ef_out, "JSON-lines transcripts (default stdout)");
  efc->callback([&] {
    auto g1 = load_graph(ef_g1);
    auto g2 = load_graph(ef_g2);
    ef::GameContext ctx{ef::GameSide(g1), ef::GameSide(g2)};
    if (ef_interactive) {
      ef::interactive_play(ctx, ef_rounds, ef_level, std::cin, std::cout);
      return;
    }
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!ef_out.empty() && ef_out != "-") {
      file.open(ef_out);
      if (!file) throw Error("cannot open " + ef_out);
      out = &file;
    }
    std::vector<ef::GameResult> results(ef_games);
    const unsigned workers =
        std::max(1u, std::min<unsigned>(threads, unsigned(ef_games)));
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    auto worker = [&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= ef_games) return;
        const auto policy = ef_spoiler == "boundary" ? ef::boundary_spoiler()
                                                     : ef::random_spoiler();
        results[i] = ef::play(ctx, ef_rounds, ef_level, policy, ef_seed + i);
      }
    };
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    int wins = 0;
    for (int i = 0; i < ef_games; ++i) {
      const auto& r = results[i];
      wins += r.win;
      Json line;
      line["game"] = i;
      line["seed"] = ef_seed + i;
      line["win"] = r.win;
      line["rounds_completed"] = r.rounds_completed;
      line["failure"] = r.failure;
      Json rounds = Json::array();
      for (const auto& rr : r.transcript)
        rounds.push_back({{"round", rr.round},
                          {"side", rr.spoiler_side == ef::Side::left ? 1 : 2},
                          {"spoiler", rr.spoiler_vertex},
                          {"duplicator", rr.duplicator_vertex},
                          {"verified_level", rr.verified_level}});
      line["transcript"] = std::move(rounds);
      (*out) << line.dump() << "\n";
    }
    std::cerr << "wins " << wins << "/" << ef_games << "\n";
  });

  // ---- urysohn -----------------------------------------------------------
  auto* ury = app.add_subcommand("urysohn", "exact rational extension suite");
  ury->require_subcommand(1);
  std::string ury_left, ury_right, ury_map, ury_out, ury_mode = "exact";
  std::uint64_t ury_seed = 1;
  std::size_t ury_rounds = 10, ury_source = SIZE_MAX, ury_random = 0;
  std::string ury_side = "left";
  for (auto* sub : {ury->add_subcommand("extend", "one-point extension"),
                    ury->add_subcommand("bnf", "alternating back-and-forth"),
                    ury->add_subcommand("rado", "graph extension step")}) {
    sub->add_option("--left", ury_left, "left space/graph file");
    sub->add_option("--right", ury_right, "right space/graph file");
    sub->add_option("--map", ury_map, "band map file");
    sub->add_option("--random-instance", ury_random,
                    "generate an instance of this size instead of reading files");
    sub->add_option("--seed", ury_seed, "seed")->capture_default_str();
    sub->add_option("--mode", ury_mode, "exact|snap")->capture_default_str();
    sub->add_option("-o,--out", ury_out, "output file");
  }
  ury->get_subcommand("extend")
      ->add_option("--source", ury_source, "index of the fresh point");
  ury->get_subcommand("extend")
      ->add_option("--side", ury_side, "left|right")
      ->capture_default_str();
  ury->get_subcommand("bnf")->add_option("--rounds", ury_rounds, "rounds")
      ->capture_default_str();

  auto ury_mode_of = [&] {
    if (ury_mode == "exact") return urysohn::ExtendMode::exact;
    if (ury_mode == "snap") return urysohn::ExtendMode::snap;
    throw CLI::ValidationError("--mode", "expected exact or snap");
  };
  auto ury_load_spaces = [&](CLI::App* sub)
      -> std::tuple<RationalMetricSpace, RationalMetricSpace, urysohn::BandMap> {
    if (ury_random > 0) {
      auto x = urysohn::random_rational_space(ury_random, ury_seed,
                                              /*exact_size=*/true);
      auto [y, map] = urysohn::compatible_instance(
          x, std::max<std::size_t>(1, x.size() / 2), ury_seed);
      return {std::move(x), std::move(y), std::move(map)};
    }
    if (ury_left.empty() || ury_right.empty())
      throw CLI::RequiredError(sub->get_name() +
                               " needs --left/--right or --random-instance");
    auto x = rational_space_from_json(read_json_file(ury_left));
    auto y = rational_space_from_json(read_json_file(ury_right));
    urysohn::BandMap map;
    if (!ury_map.empty()) map = band_map_from_json(read_json_file(ury_map));
    return {std::move(x), std::move(y), std::move(map)};
  };

  ury->get_subcommand("extend")->callback([&] {
    auto [x, y, map] = ury_load_spaces(ury->get_subcommand("extend"));
    const auto side =
        ury_side == "left" ? urysohn::MapSide::left : urysohn::MapSide::right;
    std::size_t source = ury_source;
    if (source == SIZE_MAX) {  // default: first unmapped point on the side
      const auto& s = side == urysohn::MapSide::left ? x : y;
      for (std::size_t v = 0; v < s.size(); ++v) {
        const bool taken = side == urysohn::MapSide::left
                               ? map.image(v).has_value()
                               : map.preimage(v).has_value();
        if (!taken) { source = v; break; }
      }
      if (source == SIZE_MAX) throw Error("no unmapped point to extend by");
    }
    auto outcome = urysohn::extend_map(x, y, map, source, side, ury_mode_of());
    Json j;
    j["format_version"] = kFormatVersion;
    j["config"] = effective_config(ury->get_subcommand("extend"));
    j["realized"] = outcome.realized;
    j["grew"] = outcome.grew;
    j["map"] = band_map_to_json(outcome.map);
    j["left"] = rational_space_to_json(x);
    j["right"] = rational_space_to_json(y);
    emit(j, ury_out);
  });

  ury->get_subcommand("bnf")->callback([&] {
    auto [x, y, map] = ury_load_spaces(ury->get_subcommand("bnf"));
    (void)map;  // back-and-forth always starts from the empty map
    auto result = urysohn::back_and_forth(x, y, ury_rounds, ury_seed, ury_mode_of());
    Json j;
    j["format_version"] = kFormatVersion;
    j["config"] = effective_config(ury->get_subcommand("bnf"));
    j["rounds_played"] = result.rounds_played;
    j["map"] = band_map_to_json(result.map);
    j["left"] = rational_space_to_json(result.left);
    j["right"] = rational_space_to_json(result.right);
    emit(j, ury_out);
  });

  ury->get_subcommand("rado")->callback([&] {
    urysohn::MetricGraph g1, g2;
    urysohn::BandMap map;
    if (ury_random > 0) {
      auto x = urysohn::random_rational_space(ury_random, ury_seed);
      auto [yspace, imap] = urysohn::compatible_instance(
          x, std::max<std::size_t>(1, x.size() / 2), ury_seed);
      g1 = urysohn::threshold_graph(x, 0.5, ury_seed);
      g2 = urysohn::threshold_graph(yspace, 0.5, ury_seed ^ 0x5eed);
      map = imap;
      for (std::size_t i = 0; i < map.size(); ++i)
        for (std::size_t j2 = i + 1; j2 < map.size(); ++j2) {
          const auto [xi, yi] = map.pairs[i];
          const auto [xj, yj] = map.pairs[j2];
          g2.adj[yi].assign(yj, g1.adjacent(xi, xj));
          g2.adj[yj].assign(yi, g1.adjacent(xi, xj));
        }
    } else {
      if (ury_left.empty() || ury_right.empty())
        throw CLI::RequiredError("rado needs --left/--right or --random-instance");
      g1 = metric_graph_from_json(read_json_file(ury_left));
      g2 = metric_graph_from_json(read_json_file(ury_right));
      if (!ury_map.empty()) map = band_map_from_json(read_json_file(ury_map));
    }
    std::size_t x0 = g1.size();
    for (std::size_t v = 0; v < g1.size(); ++v)
      if (!map.image(v)) x0 = v;
    if (x0 == g1.size()) throw Error("no unmapped source vertex");
    auto outcome = urysohn::rado_extend(g1, g2, map, x0, urysohn::MapSide::left,
                                        ury_mode_of());
    Json j;
    j["format_version"] = kFormatVersion;
    j["config"] = effective_config(ury->get_subcommand("rado"));
    j["source"] = x0;
    j["realized"] = outcome.realized;
    j["map"] = band_map_to_json(outcome.map);
    j["left"] = metric_graph_to_json(g1);
    j["right"] = metric_graph_to_json(g2);
    emit(j, ury_out);
  });

  // ---- verify ------------------------------------------------------------
  auto* ver = app.add_subcommand("verify", "run the acceptance suite");
  std::string ver_suite = "all";
  std::vector<int> ver_ids;
  ver->add_option("--suite", ver_suite, "all")->capture_default_str();
  ver->add_option("--criteria", ver_ids, "specific criteria numbers")
      ->delimiter(',');
  ver->callback([&] {
    std::vector<int> ids = ver_ids;
    if (ids.empty())
      for (int id = 1; id <= acceptance::kCriterionCount; ++id) ids.push_back(id);
    const int failures = acceptance::run_and_report(ids, std::cout);
    if (failures > 0) exit_code = 1;
  });

  try {
    std::reverse(args.begin(), args.end());  // CLI11 wants reversed argv
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

}  // namespace grg::cli
