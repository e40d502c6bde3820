#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ragattr/estimators.hpp"
#include "ragattr/metrics.hpp"

namespace ragattr {

struct ExperimentConfig {
  std::vector<Method> methods;
  std::vector<std::size_t> budgets{32, 64, 100};  // ignored by shapley and loo
  std::vector<std::uint64_t> seeds{0};
  std::vector<int> ks{2, 3, 4, 5};  // experiment 2 only
  EstimatorSettings settings;       // budget and seed are overridden per run
  int parallelism = 1;              // cases evaluated concurrently
};

// One estimator run scored against its references. Budget 0 marks the
// unbudgeted methods (shapley, loo).
struct MetricReport {
  std::string case_id;
  ScenarioKind scenario = ScenarioKind::kNone;
  Method method = Method::kShapley;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  std::optional<double> spearman;  // unset when undefined (constant scores)
  std::optional<double> pearson;
  std::optional<double> kendall_tau;
  std::map<int, double> precision_shapley;  // experiment 1, k in {1, 3, 5}
  std::map<int, double> precision_impact;   // experiment 2
  bool low_confidence = false;
};

// Experiment 3: min-max normalized scores of the positive pair.
struct PairReport {
  std::string case_id;
  ScenarioKind scenario = ScenarioKind::kNone;
  Method method = Method::kShapley;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  std::string order;  // "AB" when A precedes B in the document list, else "BA"
  std::optional<double> norm_a;  // unset when the score vector is constant
  std::optional<double> norm_b;
};

struct CaseIssue {
  std::string case_id;
  std::string reason;
};

struct PairSummary {
  Method method;
  std::size_t budget;
  std::string order;
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::size_t count = 0;
  std::size_t degenerate = 0;
};

struct MetricSummary {
  Method method;
  std::size_t budget;
  std::string metric;
  int k = 0;  // 0 when not applicable
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

struct ExperimentResult {
  int which = 1;
  std::size_t case_count = 0;
  std::vector<MetricReport> runs;  // experiments 1 and 2, case order then config order
  std::vector<PairReport> pairs;   // experiment 3
  std::vector<CaseIssue> failed;   // oracle or estimator errors
  std::vector<CaseIssue> skipped;  // incompatible with the experiment

  // Means over cases and seeds; failed cases and undefined values excluded.
  std::vector<MetricSummary> summarize() const;
  std::vector<PairSummary> summarize_pairs() const;
};

ExperimentResult experiment1(const std::vector<QueryCase>& cases, UtilityOracle& oracle,
                             const ExperimentConfig& config);
ExperimentResult experiment2(const std::vector<QueryCase>& cases, UtilityOracle& oracle,
                             const ExperimentConfig& config);
ExperimentResult experiment3(const std::vector<QueryCase>& cases, UtilityOracle& oracle,
                             const ExperimentConfig& config);

// Min-max normalization to [0, 1]; nullopt when the range is zero.
std::optional<std::vector<double>> min_max_normalize(const std::vector<double>& scores);

}  // namespace ragattr
