#include "ragattr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "ragattr/errors.hpp"
#include "ragattr/parallel.hpp"

namespace ragattr {

namespace {

struct RunSpec {
  Method method;
  std::size_t budget;
  std::uint64_t seed;
};

// Budgeted methods expand over budgets x seeds; shapley and loo run once.
std::vector<RunSpec> expand_runs(const ExperimentConfig& config) {
  if (config.methods.empty()) throw ConfigError("at least one method is required");
  if (config.seeds.empty()) throw ConfigError("at least one seed is required");
  std::vector<RunSpec> runs;
  for (Method m : config.methods) {
    if (!is_budgeted(m)) {
      runs.push_back({m, 0, config.seeds.front()});
      continue;
    }
    if (config.budgets.empty()) throw ConfigError("budgeted methods need at least one budget");
    for (std::size_t b : config.budgets) {
      for (std::uint64_t s : config.seeds) runs.push_back({m, b, s});
    }
  }
  return runs;
}

AttributionVector run(const RunSpec& spec, const QueryCase& c, UtilityOracle& oracle, const ExperimentConfig& config) {
  EstimatorSettings s = config.settings;
  s.budget = spec.budget ? spec.budget : s.budget;
  s.seed = spec.seed;
  s.parallelism = 1;
  return run_method(spec.method, c, oracle, s);
}

template <typename F>
std::optional<double> defined(F&& f) {
  try {
    return f();
  } catch (const UndefinedCorrelation&) {
    return std::nullopt;
  }
}

struct CaseOutcome {
  std::vector<MetricReport> runs;
  std::vector<PairReport> pairs;
  std::optional<std::string> failure;
  std::optional<std::string> skip;
};

template <typename PerCase>
ExperimentResult run_cases(int which, const std::vector<QueryCase>& cases, const ExperimentConfig& config,
                           PerCase&& per_case) {
  std::vector<CaseOutcome> outcomes(cases.size());
  parallel_for(cases.size(), config.parallelism, [&](std::size_t i) {
    try {
      outcomes[i] = per_case(cases[i]);
    } catch (const std::exception& e) {
      outcomes[i] = CaseOutcome{};
      outcomes[i].failure = e.what();
    }
  });
  ExperimentResult result;
  result.which = which;
  result.case_count = cases.size();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    auto& o = outcomes[i];
    if (o.skip) {
      result.skipped.push_back({cases[i].case_id, *o.skip});
    } else if (o.failure) {
      result.failed.push_back({cases[i].case_id, *o.failure});
    } else {
      std::move(o.runs.begin(), o.runs.end(), std::back_inserter(result.runs));
      std::move(o.pairs.begin(), o.pairs.end(), std::back_inserter(result.pairs));
    }
  }
  return result;
}

MetricReport base_report(const QueryCase& c, const RunSpec& spec, const AttributionVector& v) {
  MetricReport r;
  r.case_id = c.case_id;
  r.scenario = c.scenario;
  r.method = spec.method;
  r.budget = spec.budget;
  r.seed = spec.seed;
  r.low_confidence = v.low_confidence;
  return r;
}

}  // namespace

std::optional<std::vector<double>> min_max_normalize(const std::vector<double>& scores) {
  if (scores.empty()) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double range = *hi - *lo;
  if (!(range > 0)) return std::nullopt;
  std::vector<double> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back((s - *lo) / range);
  return out;
}

ExperimentResult experiment1(const std::vector<QueryCase>& cases, UtilityOracle& oracle,
                             const ExperimentConfig& config) {
  const auto runs = expand_runs(config);
  return run_cases(1, cases, config, [&](const QueryCase& c) {
    CaseOutcome out;
    const AttributionVector reference = exact_shapley(c, oracle, 1);
    const auto& ref = reference.scores;
    for (const auto& spec : runs) {
      const AttributionVector v = run(spec, c, oracle, config);
      MetricReport r = base_report(c, spec, v);
      if (c.n() >= 2) {
        r.spearman = defined([&] { return spearman(v.scores, ref); });
        r.pearson = defined([&] { return pearson(v.scores, ref); });
        r.kendall_tau = defined([&] { return kendall_tau(v.scores, ref); });
      }
      for (int k : {1, 3, 5}) {
        if (k <= c.n()) r.precision_shapley[k] = precision_at_k(v.scores, ref, k);
      }
      out.runs.push_back(std::move(r));
    }
    return out;
  });
}

ExperimentResult experiment2(const std::vector<QueryCase>& cases, UtilityOracle& oracle,
                             const ExperimentConfig& config) {
  const auto runs = expand_runs(config);
  if (config.ks.empty()) throw ConfigError("experiment 2 needs at least one k");
  return run_cases(2, cases, config, [&](const QueryCase& c) {
    CaseOutcome out;
    std::map<int, ImpactSet> impact;
    for (int k : config.ks) {
      if (k >= 1 && k <= c.n()) impact.emplace(k, exhaustive_impact_set(c, oracle, k));
    }
    for (const auto& spec : runs) {
      const AttributionVector v = run(spec, c, oracle, config);
      MetricReport r = base_report(c, spec, v);
      for (const auto& [k, set] : impact) r.precision_impact[k] = precision_at_k(v.scores, set.members);
      out.runs.push_back(std::move(r));
    }
    return out;
  });
}

ExperimentResult experiment3(const std::vector<QueryCase>& cases, UtilityOracle& oracle,
                             const ExperimentConfig& config) {
  const auto runs = expand_runs(config);
  return run_cases(3, cases, config, [&](const QueryCase& c) {
    CaseOutcome out;
    if (!c.positive_pair) {
      out.skip = "missing positive_pair";
      return out;
    }
    if (c.scenario == ScenarioKind::kNone) {
      out.skip = "missing scenario tag";
      return out;
    }
    const auto [a, b] = *c.positive_pair;
    for (const auto& spec : runs) {
      const AttributionVector v = run(spec, c, oracle, config);
      PairReport p;
      p.case_id = c.case_id;
      p.scenario = c.scenario;
      p.method = spec.method;
      p.budget = spec.budget;
      p.seed = spec.seed;
      p.order = a < b ? "AB" : "BA";
      if (auto norm = min_max_normalize(v.scores)) {
        p.norm_a = (*norm)[static_cast<std::size_t>(a)];
        p.norm_b = (*norm)[static_cast<std::size_t>(b)];
      }
      out.pairs.push_back(std::move(p));
    }
    return out;
  });
}

std::vector<MetricSummary> ExperimentResult::summarize() const {
  struct Acc {
    double sum = 0, sum_sq = 0;
    std::size_t n = 0;
    void add(double v) {
      sum += v;
      sum_sq += v * v;
      ++n;
    }
  };
  // Key order: method in config order of first appearance, then budget, metric, k.
  std::vector<std::tuple<Method, std::size_t, std::string, int>> keys;
  std::map<std::tuple<int, std::size_t, std::string, int>, Acc> acc;
  auto add = [&](const MetricReport& r, const std::string& metric, int k, std::optional<double> v) {
    const auto key = std::tuple{static_cast<int>(r.method), r.budget, metric, k};
    if (!acc.contains(key)) {
      acc[key] = Acc{};
      keys.emplace_back(r.method, r.budget, metric, k);
    }
    if (v && std::isfinite(*v)) acc[key].add(*v);
  };
  for (const auto& r : runs) {
    if (which == 1) {
      add(r, "spearman", 0, r.spearman);
      add(r, "pearson", 0, r.pearson);
      add(r, "kendall_tau", 0, r.kendall_tau);
      for (const auto& [k, v] : r.precision_shapley) add(r, "precision_shapley", k, v);
    } else {
      for (const auto& [k, v] : r.precision_impact) add(r, "precision_impact", k, v);
    }
  }
  std::vector<MetricSummary> out;
  for (const auto& [m, b, metric, k] : keys) {
    const Acc& a = acc[{static_cast<int>(m), b, metric, k}];
    MetricSummary s{m, b, metric, k};
    s.count = a.n;
    if (a.n > 0) {
      s.mean = a.sum / static_cast<double>(a.n);
      if (a.n > 1) {
        const double var = std::max(0.0, (a.sum_sq - a.n * s.mean * s.mean) / static_cast<double>(a.n - 1));
        s.std_error = std::sqrt(var / static_cast<double>(a.n));
      }
    } else {
      s.mean = std::nan("");
    }
    out.push_back(s);
  }
  return out;
}

std::vector<PairSummary> ExperimentResult::summarize_pairs() const {
  std::vector<PairSummary> out;
  auto find = [&](const PairReport& p) -> PairSummary& {
    for (auto& s : out) {
      if (s.method == p.method && s.budget == p.budget && s.order == p.order) return s;
    }
    out.push_back({p.method, p.budget, p.order});
    return out.back();
  };
  for (const auto& p : pairs) {
    PairSummary& s = find(p);
    if (!p.norm_a) {
      ++s.degenerate;
      continue;
    }
    s.mean_a += *p.norm_a;
    s.mean_b += *p.norm_b;
    ++s.count;
  }
  for (auto& s : out) {
    if (s.count) {
      s.mean_a /= static_cast<double>(s.count);
      s.mean_b /= static_cast<double>(s.count);
    }
  }
  return out;
}

}  // namespace ragattr
