#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "ragattr/datasets.hpp"
#include "ragattr/errors.hpp"
#include "ragattr/experiments.hpp"
#include "ragattr/report.hpp"
#include "support.hpp"

using namespace ragattr;
using ragattr::testing::make_case;

namespace {

struct Batch {
  std::vector<QueryCase> cases;
  SyntheticOracle oracle;
  void add(const GameSpec& g, ScenarioKind tag = ScenarioKind::kNone) {
    QueryCase c = make_case("c" + std::to_string(cases.size()), g.n);
    c.scenario = tag;
    if (g.kind != GameKind::kAdditive) c.positive_pair = g.pair;
    oracle.set_game(c.case_id, g);
    cases.push_back(std::move(c));
  }
};

GameSpec pair_game(GameKind kind, std::vector<double> weights, std::pair<int, int> pair) {
  GameSpec g;
  g.kind = kind;
  g.n = static_cast<int>(weights.size());
  g.weights = std::move(weights);
  g.pair = pair;
  return g;
}

ExperimentConfig config_for(std::vector<Method> methods, std::vector<std::size_t> budgets = {32}) {
  ExperimentConfig c;
  c.methods = std::move(methods);
  c.budgets = std::move(budgets);
  return c;
}

}  // namespace

TEST(Experiment1, LooIsExactOnAdditiveGames) {
  Batch b;
  std::mt19937_64 g(1);
  for (int i = 0; i < 5; ++i) b.add(ragattr::testing::random_game(g, GameKind::kAdditive, 6));
  const auto r = experiment1(b.cases, b.oracle, config_for({Method::kLoo}));
  ASSERT_EQ(r.runs.size(), 5u);
  for (const auto& run : r.runs) {
    EXPECT_DOUBLE_EQ(*run.spearman, 1.0);
    EXPECT_EQ(run.budget, 0u);
    EXPECT_DOUBLE_EQ(run.precision_shapley.at(3), 1.0);
  }
}

TEST(Experiment1, FullKernelDesignCorrelatesPerfectly) {
  Batch b;
  std::mt19937_64 g(2);
  for (int i = 0; i < 4; ++i) b.add(ragattr::testing::random_game(g, GameKind::kSynergy, 7, -1, 0.1));
  const auto r = experiment1(b.cases, b.oracle, config_for({Method::kKernelShap}, {128}));
  for (const auto& run : r.runs) {
    EXPECT_NEAR(*run.spearman, 1.0, 1e-6);
    EXPECT_NEAR(*run.pearson, 1.0, 1e-6);
    EXPECT_NEAR(*run.kendall_tau, 1.0, 1e-6);
  }
}

TEST(Experiment1, EmptyCaseList) {
  SyntheticOracle oracle;
  const auto r = experiment1({}, oracle, config_for({Method::kLoo}));
  EXPECT_TRUE(r.runs.empty());
  EXPECT_TRUE(r.summarize().empty());
  EXPECT_EQ(experiment_csv(r), "case_id,scenario,method,budget,seed,metric,k,value\n");
}

TEST(Experiment1, FailedCaseIsRecorded) {
  Batch b;
  b.add(additive_game({1, 2, 3}));
  b.cases.push_back(make_case("no-game", 3));
  const auto r = experiment1(b.cases, b.oracle, config_for({Method::kLoo}));
  ASSERT_EQ(r.failed.size(), 1u);
  EXPECT_EQ(r.failed[0].case_id, "no-game");
  EXPECT_EQ(r.runs.size(), 1u);
}

TEST(Experiment1, UndefinedCorrelationIsUnset) {
  Batch b;
  b.add(pair_game(GameKind::kRedundancy, {0, 0, 0, 0}, {0, 1}));
  const auto r = experiment1(b.cases, b.oracle, config_for({Method::kLoo}));
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_FALSE(r.runs[0].spearman.has_value());
  EXPECT_NE(experiment_csv(r).find(",spearman,,nan\n"), std::string::npos);
}

TEST(Experiment2, Examples) {
  Batch add;
  add.add(additive_game({0.5, 3, 1, 2, -1, 4}));
  const auto ra = experiment2(add.cases, add.oracle, config_for({Method::kShapley}));
  for (const auto& [k, p] : ra.runs.at(0).precision_impact) EXPECT_DOUBLE_EQ(p, 1.0) << "k=" << k;

  Batch syn;
  syn.add(pair_game(GameKind::kSynergy, {0, 0, 0, 0, 0}, {0, 1}));
  ExperimentConfig c2 = config_for({Method::kLoo});
  c2.ks = {2};
  EXPECT_DOUBLE_EQ(experiment2(syn.cases, syn.oracle, c2).runs.at(0).precision_impact.at(2), 1.0);

  Batch red;
  red.add(pair_game(GameKind::kRedundancy, {0, 0, 0.3, 0.2, 0.1}, {0, 1}));
  EXPECT_EQ(exhaustive_impact_set(red.cases[0], red.oracle, 2).members, CoalitionMask::of(5, {0, 1}));
  EXPECT_DOUBLE_EQ(experiment2(red.cases, red.oracle, c2).runs.at(0).precision_impact.at(2), 0.0);
}

TEST(Experiment3, SymmetricScenarios) {
  for (const ScenarioKind kind : {ScenarioKind::kSynergy, ScenarioKind::kRedundancy}) {
    const auto cases = generate_scenario_cases(ScenarioTemplate::with_default_lexicon(kind, 3), 4, 6);
    SyntheticOracle oracle;
    std::mt19937_64 g(4);
    for (const auto& c : cases) {
      std::vector<double> w(6);
      for (auto& x : w) x = std::uniform_real_distribution<double>(0, 0.5)(g);
      oracle.set_game(c.case_id, attach_synthetic_game(c, w));
    }
    const auto r = experiment3(cases, oracle, config_for({Method::kShapley}));
    const auto s = r.summarize_pairs();
    ASSERT_EQ(s.size(), 2u);
    for (const auto& row : s) {
      EXPECT_EQ(row.count, 4u);
      EXPECT_NEAR(row.mean_a, row.mean_b, 1e-9);
    }
    EXPECT_EQ(s[0].order, "AB");
    EXPECT_EQ(s[1].order, "BA");
  }
}

TEST(Experiment3, DegenerateAndSkippedCases) {
  Batch b;
  b.add(pair_game(GameKind::kRedundancy, {0, 0, 0}, {0, 1}), ScenarioKind::kRedundancy);
  b.add(additive_game({1, 2, 3}));
  const auto r = experiment3(b.cases, b.oracle, config_for({Method::kLoo}));
  ASSERT_EQ(r.skipped.size(), 1u);
  EXPECT_EQ(r.skipped[0].case_id, "c1");
  const auto s = r.summarize_pairs();
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].degenerate, 1u);
  EXPECT_EQ(s[0].count, 0u);
  EXPECT_TRUE(experiment_summary_json(r)["means"][0]["mean_a"].is_null());
}

TEST(Experiments, DeterministicAcrossParallelism) {
  Batch b;
  std::mt19937_64 g(5);
  for (int i = 0; i < 6; ++i) b.add(ragattr::testing::random_game(g, GameKind::kComplementarity, 7, -1, 0.05));
  ExperimentConfig c = config_for({Method::kTmc, Method::kKernelShap, Method::kContextCite}, {16, 40});
  c.seeds = {0, 1};
  const std::string one = experiment_csv(experiment1(b.cases, b.oracle, c));
  c.parallelism = 4;
  c.settings.parallelism = 2;
  EXPECT_EQ(experiment_csv(experiment1(b.cases, b.oracle, c)), one);
}

TEST(Report, CsvShape) {
  Batch b;
  std::mt19937_64 g(6);
  for (int i = 0; i < 3; ++i) b.add(ragattr::testing::random_game(g, GameKind::kAdditive, 5));
  const auto r = experiment1(b.cases, b.oracle, config_for({Method::kLoo, Method::kKernelShap}, {32}));
  std::istringstream csv(experiment_csv(r));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "case_id,scenario,method,budget,seed,metric,k,value");
  std::set<std::string> methods;
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7) << line;
    std::istringstream fields(line);
    std::string field;
    for (int i = 0; i < 3; ++i) std::getline(fields, field, ',');
    methods.insert(field);
  }
  // 3 correlations + precision at k = 1, 3, 5 per run.
  EXPECT_EQ(rows, 3 * 2 * 6);
  EXPECT_EQ(methods, (std::set<std::string>{"loo", "kernel_shap"}));
  const auto summary = experiment_summary_json(r);
  EXPECT_EQ(summary["experiment"], 1);
  EXPECT_EQ(summary["cases"], 3);
}

TEST(Report, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(MinMax, Normalize) {
  const auto v = min_max_normalize({2, 4, 3});
  ASSERT_TRUE(v);
  EXPECT_EQ(*v, (std::vector<double>{0, 1, 0.5}));
  EXPECT_FALSE(min_max_normalize({1, 1, 1}));
}
