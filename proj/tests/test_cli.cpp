#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "ragattr/cache.hpp"
#include "ragattr/datasets.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace ragattr;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ragattr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ragattr_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name)) << content;
    return path(name);
  }

  // Cases with random embedded games.
  std::string game_cases(const std::string& name, int count, int n, std::uint64_t seed) const {
    std::mt19937_64 g(seed);
    const GameKind kinds[] = {GameKind::kAdditive, GameKind::kRedundancy, GameKind::kComplementarity,
                              GameKind::kSynergy};
    std::vector<QueryCase> cases;
    for (int i = 0; i < count; ++i) {
      QueryCase c = ragattr::testing::make_case("case" + std::to_string(i), n);
      c.extra["game"] = ragattr::testing::random_game(g, kinds[i % 4], n, -1, 0.05).to_json();
      cases.push_back(std::move(c));
    }
    save_cases(path(name), cases);
    return path(name);
  }

  fs::path dir_;
};

const char* kAdditiveCase =
    R"({"id":"add","query":"q","documents":[{"id":"d0","text":"a"},{"id":"d1","text":"b"},{"id":"d2","text":"c"}],)"
    R"("game":{"kind":"additive","weights":[1,2,3]}})"
    "\n";

}  // namespace

TEST_F(CliTest, AttributeRanksAndWritesArtifact) {
  const auto cases = write("add.jsonl", kAdditiveCase);
  const auto r = run({"attribute", cases, "--methods", "shapley", "--out", path("attr.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto d2 = r.out.find("\td2\t"), d1 = r.out.find("\td1\t"), d0 = r.out.find("\td0\t");
  ASSERT_NE(d0, std::string::npos);
  EXPECT_LT(d2, d1);
  EXPECT_LT(d1, d0);
  const auto artifact = nlohmann::json::parse(slurp(path("attr.json")));
  const auto& res = artifact["results"][0];
  EXPECT_EQ(res["method"], "shapley");
  EXPECT_EQ(res["case_id"], "add");
  EXPECT_EQ(res["scores"], (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(res["seed"], 0);
}

TEST_F(CliTest, MissingCaseFile) {
  const auto missing = path("nope.jsonl");
  const auto r = run({"attribute", missing});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(missing), std::string::npos);
}

TEST_F(CliTest, RerunUsesCache) {
  const auto cases = write("add.jsonl", kAdditiveCase);
  const std::vector<std::string> args = {"attribute", cases,      "--methods", "shapley,kernel_shap,tmc",
                                         "--budgets", "6",        "--cache",   path("cache.jsonl"),
                                         "--out",     path("a.json")};
  const auto first = run(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_NE(first.out.find("fresh evaluations: 8"), std::string::npos) << first.out;
  const auto artifact = slurp(path("a.json"));
  const auto lines = line_count(path("cache.jsonl"));

  const auto second = run(args);
  ASSERT_EQ(second.code, 0);
  EXPECT_NE(second.out.find("fresh evaluations: 0"), std::string::npos) << second.out;
  EXPECT_EQ(line_count(path("cache.jsonl")), lines);
  EXPECT_EQ(slurp(path("a.json")), artifact);
  std::string expected = first.out;
  expected.replace(expected.find("fresh evaluations: 8"), 20, "fresh evaluations: 0");
  EXPECT_EQ(second.out, expected);
}

TEST_F(CliTest, UnknownMethodIsUsageError) {
  const auto cases = write("add.jsonl", kAdditiveCase);
  EXPECT_EQ(run({"attribute", cases, "--methods", "gradients"}).code, 2);
  EXPECT_EQ(run({"attribute"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST_F(CliTest, CaseWithoutGameIsConfigError) {
  const auto cases = write("bare.jsonl", R"({"id":"x","query":"q","documents":[{"id":"a","text":"t"}]})"
                                         "\n");
  const auto r = run({"attribute", cases});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'x'"), std::string::npos);
}

TEST_F(CliTest, ConfigFileWithFlagPrecedence) {
  const auto cases = write("add.jsonl", kAdditiveCase);
  const auto config = write("run.toml", "[attribute]\nmethods = [\"loo\"]\nseed = 7\nout = \"" + path("cfg.json") + "\"\n");
  auto r = run({"--config", config, "attribute", cases});
  ASSERT_EQ(r.code, 0) << r.err;
  auto artifact = nlohmann::json::parse(slurp(path("cfg.json")));
  EXPECT_EQ(artifact["results"][0]["method"], "loo");
  EXPECT_EQ(artifact["seed"], 7);

  r = run({"--config", config, "attribute", cases, "--methods", "shapley", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  artifact = nlohmann::json::parse(slurp(path("cfg.json")));
  EXPECT_EQ(artifact["results"][0]["method"], "shapley");
  EXPECT_EQ(artifact["seed"], 3);
}

TEST_F(CliTest, ExperimentOneCsvBlocks) {
  const auto cases = game_cases("games.jsonl", 10, 6, 1);
  const auto r = run({"experiment", "--which", "1", cases, "--methods", "loo,kernel_shap", "--budgets", "32",
                      "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(path("out/experiment1.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "case_id,scenario,method,budget,seed,metric,k,value");
  std::vector<std::string> blocks;
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string f;
    for (int i = 0; i < 3; ++i) std::getline(fields, f, ',');
    if (blocks.empty() || blocks.back() != f) blocks.push_back(f);
  }
  EXPECT_EQ(rows, 10u * 2 * 6);
  std::set<std::string> methods(blocks.begin(), blocks.end());
  EXPECT_EQ(methods, (std::set<std::string>{"loo", "kernel_shap"}));
  const auto summary = nlohmann::json::parse(slurp(path("out/experiment1_summary.json")));
  EXPECT_EQ(summary["cases"], 10);
}

TEST_F(CliTest, InterruptedExperimentResumes) {
  const auto cases = game_cases("games.jsonl", 8, 7, 2);
  auto args = [&](const std::string& cache, const std::string& out) {
    return std::vector<std::string>{"experiment", "--which", "2", cases, "--methods", "shapley,tmc,context_cite",
                                    "--budgets", "20,40", "--seeds", "0,1", "--k", "2,3", "--cache", path(cache),
                                    "--out", path(out), "--parallelism", "3"};
  };
  ASSERT_EQ(run(args("full.jsonl", "full")).code, 0);
  const std::string reference = slurp(path("full/experiment2.csv"));

  // Keep the first third of the cache plus a torn final line.
  const std::string cache = slurp(path("full.jsonl"));
  std::size_t cut = 0;
  for (std::size_t lines = 0; lines < line_count(path("full.jsonl")) / 3; ++lines) cut = cache.find('\n', cut) + 1;
  write("partial.jsonl", cache.substr(0, cut) + cache.substr(cut, 20));

  const auto resumed = run(args("partial.jsonl", "resumed"));
  ASSERT_EQ(resumed.code, 0) << resumed.err;
  EXPECT_NE(resumed.err.find("warning: cache"), std::string::npos);
  EXPECT_EQ(slurp(path("resumed/experiment2.csv")), reference);
  EXPECT_EQ(slurp(path("resumed/experiment2_summary.json")), slurp(path("full/experiment2_summary.json")));

  const auto again = run(args("partial.jsonl", "resumed"));
  EXPECT_NE(again.out.find("fresh evaluations: 0"), std::string::npos);
  EXPECT_EQ(slurp(path("resumed/experiment2.csv")), reference);
}

TEST_F(CliTest, ExperimentThreeSummary) {
  ASSERT_EQ(run({"gen-synthetic", "--kind", "synergy", "--count", "3", "--out", path("syn.jsonl")}).code, 0);
  const auto r = run({"experiment", "--which", "3", path("syn.jsonl"), "--methods", "shapley,kernel_shap",
                      "--budgets", "64", "--out", path("out3")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto summary = nlohmann::json::parse(slurp(path("out3/experiment3_summary.json")));
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& m : summary["means"]) {
    EXPECT_TRUE(m.contains("mean_a"));
    EXPECT_TRUE(m.contains("mean_b"));
    seen.emplace(m["method"].get<std::string>(), m["order"].get<std::string>());
  }
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_TRUE(seen.contains({"shapley", "BA"}));
}

TEST_F(CliTest, ExperimentThreeSkipsCasesWithoutPairs) {
  const auto cases = game_cases("games.jsonl", 3, 4, 3);
  const auto r = run({"experiment", "--which", "3", cases, "--methods", "loo", "--out", path("o")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("warnings: 3"), std::string::npos) << r.out;
  EXPECT_NE(r.err.find("skipped case0"), std::string::npos) << r.err;
}

TEST_F(CliTest, GenSynthetic) {
  const auto r = run({"gen-synthetic", "--kind", "synergy", "--count", "20", "--seed", "4", "--out", path("a.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(path("a.jsonl")), 40u);
  run({"gen-synthetic", "--kind", "synergy", "--count", "20", "--seed", "4", "--out", path("b.jsonl")});
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_EQ(load_cases(path("a.jsonl")).size(), 40u);

  EXPECT_EQ(run({"gen-synthetic", "--kind", "foo", "--out", path("c.jsonl")}).code, 2);
  // Parent is a regular file.
  EXPECT_EQ(run({"gen-synthetic", "--kind", "synergy", "--out", path("a.jsonl") + "/y.jsonl"}).code, 2);
}

TEST_F(CliTest, CacheSummaries) {
  write("empty.jsonl", "");
  auto r = run({"cache", "stats", path("empty.jsonl")});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("records: 0"), std::string::npos);

  const auto cases = game_cases("games.jsonl", 1, 10, 4);
  ASSERT_EQ(run({"attribute", cases, "--methods", "shapley", "--cache", path("c.jsonl"), "--out", path("x.json")}).code,
            0);
  r = run({"cache", "inspect", path("c.jsonl")});
  EXPECT_NE(r.out.find("records: 1024"), std::string::npos);
  EXPECT_NE(r.out.find("case0\tsynthetic\t1024/1024"), std::string::npos) << r.out;

  std::string five;
  for (std::uint32_t i = 0; i < 5; ++i) {
    five += i == 3 ? std::string("garbage\n") : format_cache_line({{"k", "m", i}, {1.0, 2}}) + "\n";
  }
  write("five.jsonl", five);
  r = run({"cache", "inspect", path("five.jsonl")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("records: 4"), std::string::npos);
  EXPECT_NE(r.out.find("warnings: 1"), std::string::npos);
  EXPECT_NE(r.out.find("tokens: 8"), std::string::npos);
  EXPECT_NE(r.err.find("line 4"), std::string::npos);

  EXPECT_EQ(run({"cache", "stats", path("absent.jsonl")}).code, 2);
  EXPECT_EQ(run({"cache", "dump", path("five.jsonl")}).code, 2);
}

TEST_F(CliTest, RemoteOracleThroughLocalEndpoint) {
  ragattr::testing::MockScoringServer server;
  server.set_gain("alpha", 1.0);
  server.set_gain("beta", 0.5);
  const auto cases = write(
      "r.jsonl", R"({"id":"r","query":"q","documents":[{"id":"a","text":"alpha"},{"id":"b","text":"beta"}]})"
                 "\n");
  const auto r = run({"experiment", "--which", "1", cases, "--oracle", "remote_llm", "--endpoint", server.url(),
                      "--model", "m", "--methods", "loo", "--cache", path("c.jsonl"), "--out", path("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  // Generated target response is saved next to the report.
  const auto resolved = load_cases(path("o/cases.resolved.jsonl"));
  EXPECT_EQ(*resolved[0].target_response, "an answer");
  EXPECT_EQ(server.score_requests(), 4);
}

TEST_F(CliTest, RemoteFailureExitsOneAndKeepsCache) {
  ragattr::testing::MockScoringServer server;
  const auto cases = write("r.jsonl",
                           R"({"id":"r","query":"q","documents":[{"id":"a","text":"alpha"}],"target_response":"t"})"
                           "\n");
  const auto dead = run({"attribute", cases, "--oracle", "remote_llm", "--endpoint", "http://127.0.0.1:1",
                         "--model", "m", "--max-retries", "0", "--timeout", "2",
                         "--cache", path("c.jsonl"), "--out", path("x.json")});
  EXPECT_EQ(dead.code, 1);
  EXPECT_FALSE(fs::exists(path("x.json")));

  ASSERT_EQ(run({"attribute", cases, "--oracle", "remote_llm", "--endpoint", server.url(), "--model", "m",
                 "--cache", path("c.jsonl"), "--out", path("x.json")})
                .code,
            0);
  EXPECT_EQ(line_count(path("c.jsonl")), 2u);
}

TEST_F(CliTest, RemoteNeedsModelAndCredential) {
  const auto cases = write("add.jsonl", kAdditiveCase);
  EXPECT_EQ(run({"attribute", cases, "--oracle", "remote_llm", "--endpoint", "http://127.0.0.1:1"}).code, 2);
  EXPECT_EQ(run({"attribute", cases, "--oracle", "remote_llm", "--endpoint", "http://127.0.0.1:1", "--model", "m",
                 "--credential-env", "RAGATTR_CLI_TEST_UNSET_VAR"})
                .code,
            2);
}
