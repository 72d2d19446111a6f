#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "grg/cli.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = grg::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("grg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("GRG_SEED");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("GRG_SEED");
  }
  fs::path write_config(const json& j, const std::string& name = "config.json") {
    const auto p = dir_ / name;
    std::ofstream(p) << j.dump();
    return p;
  }
  fs::path dir_;
};

const json kT1 = {{"model", {{"type", "exponential"}, {"rate", 1.0}}},
                  {"n_grid", {100, 300}},
                  {"replications", 100},
                  {"theorem", "T1"},
                  {"master_seed", 42}};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, grg::kExitConfig);
  EXPECT_EQ(run({"bogus"}).code, grg::kExitConfig);
  EXPECT_EQ(run({"sample", "--model", "exponential:rate=1"}).code, grg::kExitConfig);
  EXPECT_EQ(run({"sample", "--model", "exponential:rate=1", "--n", "10", "--frobnicate"}).code,
            grg::kExitConfig);
  EXPECT_EQ(run({"sample", "--model", "weibull:k=1", "--n", "10"}).code, grg::kExitConfig);
  EXPECT_EQ(run({"--help"}).code, grg::kExitOk);
}

TEST_F(CliTest, SamplePrintsJson) {
  const auto r = run({"sample", "--model", "pareto:alpha=1.5,xm=1", "--n", "1000", "--seed", "3"});
  ASSERT_EQ(r.code, grg::kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("n"), 1000);
  EXPECT_EQ(j.at("seed"), 3);
  EXPECT_EQ(j.at("sampler"), "fast");
  EXPECT_GT(j.at("edge_count").get<int>(), 0);
  const auto again = run({"sample", "--model", "pareto:alpha=1.5,xm=1", "--n", "1000", "--seed", "3"});
  EXPECT_EQ(again.out, r.out);
}

TEST_F(CliTest, SampleWritesEdges) {
  const auto edges = dir_ / "edges.txt";
  const auto r = run({"sample", "--model", "exponential:rate=1", "--n", "200", "--sampler", "naive",
                      "--edges", edges.string()});
  ASSERT_EQ(r.code, grg::kExitOk) << r.err;
  const auto j = json::parse(r.out);
  std::ifstream in(edges);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, j.at("edge_count").get<std::size_t>());
}

TEST_F(CliTest, SampleRejectsConstantWeightOutOfDomain) {
  EXPECT_EQ(run({"sample", "--model", "constant:lambda=20", "--n", "10"}).code, grg::kExitConfig);
}

TEST_F(CliTest, ExperimentWritesArtifacts) {
  const auto cfg = write_config(kT1);
  const auto out = dir_ / "run";
  const auto r = run({"experiment", "--config", cfg.string(), "--out", out.string()});
  ASSERT_EQ(r.code, grg::kExitOk) << r.err;
  for (const char* f : {"result.csv", "summary.json", "manifest.json", "hist_100.svg", "hist_300.svg"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto summary = json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(summary.at("schema_version"), 1);
  EXPECT_EQ(summary.at("points").size(), 2u);
  const auto manifest = json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(manifest.at("master_seed"), 42);
  EXPECT_TRUE(manifest.contains("version"));
  const std::string csv = slurp(out / "result.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,replication,statistic,edge_count,L_n");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 201);
}

TEST_F(CliTest, ResultCsvIsThreadIndependent) {
  const auto cfg = write_config(kT1);
  std::string first;
  for (const char* threads : {"1", "2", "7"}) {
    const auto out = dir_ / (std::string("t") + threads);
    ASSERT_EQ(run({"experiment", "--config", cfg.string(), "--out", out.string(), "--threads", threads}).code,
              grg::kExitOk);
    const std::string csv = slurp(out / "result.csv");
    if (first.empty()) first = csv;
    EXPECT_EQ(csv, first) << threads;
    EXPECT_EQ(slurp(out / "summary.json"), slurp(dir_ / "t1" / "summary.json"));
  }
}

TEST_F(CliTest, SeedPrecedence) {
  const auto cfg = write_config(kT1);
  ASSERT_EQ(run({"experiment", "--config", cfg.string(), "--out", (dir_ / "cfg").string()}).code, 0);
  setenv("GRG_SEED", "7", 1);
  ASSERT_EQ(run({"experiment", "--config", cfg.string(), "--out", (dir_ / "env").string()}).code, 0);
  ASSERT_EQ(run({"experiment", "--config", cfg.string(), "--out", (dir_ / "flag").string(), "--seed", "42"}).code,
            0);
  unsetenv("GRG_SEED");
  ASSERT_EQ(run({"experiment", "--config", cfg.string(), "--out", (dir_ / "seven").string(), "--seed", "7"}).code,
            0);
  EXPECT_EQ(slurp(dir_ / "flag" / "result.csv"), slurp(dir_ / "cfg" / "result.csv"));
  EXPECT_EQ(slurp(dir_ / "env" / "result.csv"), slurp(dir_ / "seven" / "result.csv"));
  EXPECT_NE(slurp(dir_ / "env" / "result.csv"), slurp(dir_ / "cfg" / "result.csv"));
  EXPECT_EQ(json::parse(slurp(dir_ / "env" / "manifest.json")).at("master_seed"), 7);
  setenv("GRG_SEED", "abc", 1);
  EXPECT_EQ(run({"experiment", "--config", cfg.string(), "--out", (dir_ / "bad").string()}).code, grg::kExitConfig);
}

TEST_F(CliTest, ConfigErrorsWriteNothing) {
  json zero = kT1;
  zero["replications"] = 0;
  const auto out = dir_ / "zero";
  EXPECT_EQ(run({"experiment", "--config", write_config(zero).string(), "--out", out.string()}).code,
            grg::kExitConfig);
  EXPECT_FALSE(fs::exists(out / "result.csv"));
  json unknown = kT1;
  unknown["typo"] = 1;
  EXPECT_EQ(run({"experiment", "--config", write_config(unknown).string(), "--out", out.string()}).code,
            grg::kExitConfig);
  std::ofstream(dir_ / "broken.json") << "{not json";
  EXPECT_EQ(run({"experiment", "--config", (dir_ / "broken.json").string()}).code, grg::kExitConfig);
  EXPECT_EQ(run({"experiment", "--config", (dir_ / "missing.json").string()}).code, grg::kExitConfig);
}

TEST_F(CliTest, HypothesisViolationIsAConfigError) {
  json heavy = kT1;
  heavy["model"] = "pareto:alpha=1.5,xm=1";
  EXPECT_EQ(run({"experiment", "--config", write_config(heavy).string(), "--out", (dir_ / "h").string()}).code,
            grg::kExitConfig);
  json light = kT1;
  light["theorem"] = "T2";
  EXPECT_EQ(run({"experiment", "--config", write_config(light).string(), "--out", (dir_ / "l").string()}).code,
            grg::kExitConfig);
}

TEST_F(CliTest, NumericalFailureExitsWithTwo) {
  // No root of the norming equation exists for n = 2.
  json tiny = {{"model", "pareto:alpha=1.5,xm=1"}, {"n_grid", {2}}, {"replications", 100}, {"theorem", "T2"}};
  EXPECT_EQ(run({"experiment", "--config", write_config(tiny).string(), "--out", (dir_ / "t").string()}).code,
            grg::kExitNumerical);
}

TEST_F(CliTest, ReportReproducesSummary) {
  json t2 = {{"model", "pareto:alpha=1.5,xm=1"}, {"n_grid", {200, 800}}, {"replications", 100},
             {"theorem", "T2"}, {"master_seed", 1}};
  const auto out = dir_ / "run";
  ASSERT_EQ(run({"experiment", "--config", write_config(t2).string(), "--out", out.string()}).code, 0);
  EXPECT_TRUE(fs::exists(out / "qq_200.svg"));
  const auto again = dir_ / "again";
  const auto r = run({"report", "--in", out.string(), "--out", again.string()});
  ASSERT_EQ(r.code, grg::kExitOk) << r.err;
  EXPECT_EQ(slurp(again / "summary.json"), slurp(out / "summary.json"));
  EXPECT_EQ(slurp(again / "result.csv"), slurp(out / "result.csv"));
  EXPECT_EQ(run({"report", "--in", (dir_ / "nothing").string()}).code, grg::kExitConfig);
}

TEST_F(CliTest, AuditWritesCsv) {
  json a = {{"model", "pareto:alpha=1.5,xm=1"}, {"n_grid", {100, 1000}}, {"replications", 3},
            {"theorem", "AUDIT"},               {"t_values", {1.0}},      {"pair_draws", 10000}};
  const auto out = dir_ / "audit";
  const auto r = run({"audit", "--config", write_config(a).string(), "--out", out.string()});
  ASSERT_EQ(r.code, grg::kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(out / "audit.csv"));
  const auto s = json::parse(slurp(out / "audit_summary.json"));
  EXPECT_EQ(s.at("schema_version"), 1);
  json big = a;
  big["n_grid"] = {30000};
  EXPECT_EQ(run({"audit", "--config", write_config(big, "big.json").string(), "--out", out.string()}).code,
            grg::kExitConfig);
}

TEST_F(CliTest, Lemma1Outputs) {
  const auto r = run({"lemma1", "--model", "pareto:alpha=1.5,xm=1", "--x", "100,10000"});
  ASSERT_EQ(r.code, grg::kExitOk) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
  const auto out = dir_ / "lemma";
  ASSERT_EQ(run({"lemma1", "--model", "pareto:alpha=1.5,xm=1", "--out", out.string()}).code, 0);
  const auto j = json::parse(slurp(out / "lemma1.json"));
  EXPECT_TRUE(j.at("printed_constant_discrepancy").at("flagged").get<bool>());
  EXPECT_NEAR(j.at("printed_constant_discrepancy").at("observed_ratio").get<double>(), 3.0, 1e-3);
  EXPECT_EQ(run({"lemma1", "--model", "exponential:rate=1"}).code, grg::kExitConfig);
  EXPECT_EQ(run({"lemma1", "--model", "pareto:alpha=2.5,xm=1"}).code, grg::kExitConfig);
}

}  // namespace
