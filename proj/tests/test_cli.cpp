#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "grg/cli.hpp"

namespace grg::cli {
namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / ("grg_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

TEST(Cli, GenWritesReloadableGraph) {
  TempDir tmp;
  const auto out = tmp.path("g.json");
  ASSERT_EQ(run({"gen", "--space", "circle", "--L", "5", "--n", "200", "--p",
                 "0.5", "--seed", "1", "-o", out}),
            0);
  auto g = load_graph(out);
  EXPECT_EQ(g.size(), 200u);
  EXPECT_TRUE(g.has_coords());
  EXPECT_EQ(g.space->kind(), SpaceKind::circle);
  auto j = read_json_file(out);
  EXPECT_EQ(j.at("format_version").get<int>(), kFormatVersion);
  EXPECT_TRUE(j.contains("config"));

  // Deterministic rerun produces byte-identical artifacts.
  std::string first;
  {
    std::ifstream a(out);
    first.assign((std::istreambuf_iterator<char>(a)), {});
  }
  ASSERT_EQ(run({"gen", "--space", "circle", "--L", "5", "--n", "200", "--p",
                 "0.5", "--seed", "1", "-o", out}),
            0);
  std::ifstream b(out);
  std::string second((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(first, second);
}

TEST(Cli, SampleExport) {
  TempDir tmp;
  const auto out = tmp.path("s.json");
  ASSERT_EQ(run({"sample", "--space", "flat_torus", "--L1", "3", "--L2", "2",
                 "--n", "50", "--seed", "3", "-o", out}),
            0);
  auto s = sample_from_json(read_json_file(out));
  EXPECT_EQ(s.size(), 50u);
}

TEST(Cli, AlphaReport) {
  TempDir tmp;
  const auto graph = tmp.path("g.json");
  ASSERT_EQ(run({"gen", "--space", "circle", "--L", "5", "--n", "1500", "--p",
                 "0.5", "--seed", "2", "-o", graph}),
            0);
  const auto report = tmp.path("alpha.json");
  const auto csv = tmp.path("alpha.csv");
  ASSERT_EQ(run({"alpha", "--graph", graph, "--sizes", "150,300", "--deltas",
                 "0.05", "--seed", "5", "-o", report, "--csv", csv}),
            0);
  auto j = read_json_file(report);
  EXPECT_NEAR(j.at("theoretical").get<double>(), 0.4, 1e-12);
  EXPECT_NEAR(j.at("estimate").get<double>(), 0.4, 0.08);
  EXPECT_EQ(j.at("sets").size(), 2u);
  std::ifstream c(csv);
  std::string header;
  std::getline(c, header);
  EXPECT_EQ(header, "size,delta,adjacency_upper,ball_upper");
}

TEST(Cli, RecoverReport) {
  TempDir tmp;
  const auto graph = tmp.path("g.json");
  ASSERT_EQ(run({"gen", "--space", "circle", "--L", "6", "--n", "900", "--p",
                 "0.5", "--seed", "4", "-o", graph}),
            0);
  const auto report = tmp.path("recover.json");
  ASSERT_EQ(run({"recover", "--graph", graph, "--triples", "400", "--probes",
                 "60", "-o", report}),
            0);
  auto j = read_json_file(report);
  EXPECT_GE(j.at("ball_relation").at("agreement").get<double>(), 0.97);
  EXPECT_GE(j.at("order").at("agreement").get<double>(), 0.95);
  EXPECT_LE(j.at("translate").at("median_error").get<double>(), 0.05);
  EXPECT_GE(j.at("loop").at("arc_count").get<int>(), 7);
}

TEST(Cli, GecProbeEmitsJsonLines) {
  TempDir tmp;
  const auto graph = tmp.path("g.json");
  ASSERT_EQ(run({"gen", "--space", "circle", "--L", "5", "--n", "500", "--p",
                 "0.5", "--seed", "6", "-o", graph}),
            0);
  const auto lines = tmp.path("probes.jsonl");
  ASSERT_EQ(run({"gec-probe", "--graph", graph, "--trials", "25",
                 "--max-pattern", "3", "--epsilon", "0.3", "--seed", "7", "-o",
                 lines}),
            0);
  std::ifstream in(lines);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    auto j = Json::parse(line);
    EXPECT_TRUE(j.contains("s"));
    EXPECT_TRUE(j.contains("witness"));
    ++count;
  }
  EXPECT_EQ(count, 25);
}

TEST(Cli, EfBatchTranscripts) {
  TempDir tmp;
  const auto g1 = tmp.path("g1.json");
  const auto g2 = tmp.path("g2.json");
  ASSERT_EQ(run({"gen", "--space", "circle", "--L", "5.3", "--n", "600", "--p",
                 "0.5", "--seed", "8", "-o", g1}),
            0);
  ASSERT_EQ(run({"gen", "--space", "circle", "--L", "5.3", "--n", "600", "--p",
                 "0.5", "--seed", "9", "-o", g2}),
            0);
  const auto out = tmp.path("games.jsonl");
  ASSERT_EQ(run({"ef", "--graph1", g1, "--graph2", g2, "--rounds", "2",
                 "--level", "1", "--games", "5", "--seed", "11", "-o", out}),
            0);
  std::ifstream in(out);
  std::string line;
  int count = 0, wins = 0;
  while (std::getline(in, line)) {
    auto j = Json::parse(line);
    wins += j.at("win").get<bool>();
    ++count;
  }
  EXPECT_EQ(count, 5);
  EXPECT_GE(wins, 3);
}

TEST(Cli, UrysohnSubcommands) {
  TempDir tmp;
  const auto out = tmp.path("bnf.json");
  ASSERT_EQ(run({"urysohn", "bnf", "--random-instance", "8", "--seed", "3",
                 "--rounds", "8", "-o", out}),
            0);
  auto j = read_json_file(out);
  EXPECT_EQ(j.at("rounds_played").get<int>(), 8);
  auto left = rational_space_from_json(j.at("left"));
  EXPECT_TRUE(validate_metric(left, true).empty());

  const auto ext = tmp.path("extend.json");
  ASSERT_EQ(run({"urysohn", "extend", "--random-instance", "5", "--seed", "4",
                 "-o", ext}),
            0);
  auto je = read_json_file(ext);
  EXPECT_TRUE(je.contains("realized"));

  const auto rado = tmp.path("rado.json");
  ASSERT_EQ(run({"urysohn", "rado", "--random-instance", "6", "--seed", "5",
                 "-o", rado}),
            0);
  auto jr = read_json_file(rado);
  auto g2 = metric_graph_from_json(jr.at("right"));
  EXPECT_GE(g2.size(), 1u);
}

TEST(Cli, VerifyRunsSelectedCriteria) {
  testing::internal::CaptureStdout();
  const int code = run({"verify", "--criteria", "11"});
  const std::string out = testing::internal::GetCapturedStdout();
  EXPECT_EQ(code, 0);
  EXPECT_NE(out.find("[PASS] C11"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"no-such-command"}), 2);
  EXPECT_EQ(run({"gen", "--space", "circle"}), 2);  // missing -o
  EXPECT_EQ(run({}), 2);
}

TEST(Cli, OperationalErrorsExitOne) {
  EXPECT_EQ(run({"alpha", "--graph", "/nonexistent/file.json"}), 1);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  TempDir tmp;
  const auto cfg = tmp.path("grg.ini");
  {
    std::ofstream f(cfg);
    f << "[gen]\nspace = circle\nL = 5\nn = 120\np = 0.5\nseed = 2\n";
  }
  const auto out = tmp.path("g.json");
  ASSERT_EQ(run({"--config", cfg, "gen", "--n", "80", "-o", out}), 0);
  auto g = load_graph(out);
  EXPECT_EQ(g.size(), 80u);  // flag beats the config file
}

}  // namespace
}  // namespace grg::cli
