#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "ragattr/errors.hpp"
#include "ragattr/estimators.hpp"
#include "ragattr/evaluator.hpp"
#include "ragattr/random.hpp"
#include "ragattr/regress.hpp"

namespace ragattr {

namespace {

constexpr std::uint64_t kKernelStream = 3;
constexpr std::uint64_t kSurrogateStream = 4;
constexpr std::uint64_t kFoldStream = 5;
constexpr int kCvFolds = 5;
constexpr int kLambdaGrid = 25;
constexpr double kLambdaGridSpan = 1e-4;  // smallest / largest lambda

CoalitionMask sample_of_size(int n, int size, rng::Engine& g) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  std::uint32_t bits = 0;
  for (int k = 0; k < size; ++k) {
    const auto pick = static_cast<std::size_t>(k) +
                      static_cast<std::size_t>(rng::uniform_below(g, static_cast<std::uint64_t>(n - k)));
    std::swap(pool[static_cast<std::size_t>(k)], pool[pick]);
    bits |= 1u << pool[static_cast<std::size_t>(k)];
  }
  return CoalitionMask(n, bits);
}

std::size_t sample_size(const std::vector<double>& pmf, rng::Engine& g) {
  const double u = rng::uniform01(g);
  double acc = 0.0;
  for (std::size_t s = 1; s < pmf.size(); ++s) {
    acc += pmf[s];
    if (u < acc) return s;
  }
  return pmf.size() - 1;
}

AttributionVector finish(Method m, const QueryCase& c, const EstimatorSettings& settings,
                         const CoalitionValues& values) {
  AttributionVector out;
  out.method = m;
  out.case_id = c.case_id;
  out.budget = settings.budget;
  out.seed = settings.seed;
  out.oracle_calls = values.calls();
  return out;
}

DesignMatrix subset_rows(const DesignMatrix& d, const std::vector<Eigen::Index>& rows) {
  DesignMatrix out;
  out.fit_intercept = d.fit_intercept;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), d.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  out.w.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out.x.row(r) = d.x.row(rows[i]);
    out.y(r) = d.y(rows[i]);
    out.w(r) = d.w(rows[i]);
  }
  return out;
}

// Lambda minimizing 5-fold cross-validated squared error over a fixed
// log-spaced grid below lambda_max of the full design.
double cross_validated_lambda(const DesignMatrix& d, std::uint64_t seed) {
  const double lambda_max = lasso_lambda_max(d);
  std::vector<double> grid;
  for (int i = 0; i < kLambdaGrid; ++i) {
    grid.push_back(lambda_max * std::pow(kLambdaGridSpan, static_cast<double>(i) / (kLambdaGrid - 1)));
  }
  const Eigen::Index m = d.rows();
  if (lambda_max == 0.0 || m < kCvFolds) return grid.back();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  auto g = rng::make_engine(seed, kFoldStream);
  rng::shuffle(order.begin(), order.end(), g);

  std::vector<double> error(grid.size(), 0.0);
  for (int fold = 0; fold < kCvFolds; ++fold) {
    std::vector<Eigen::Index> train, test;
    for (std::size_t i = 0; i < order.size(); ++i) {
      (static_cast<int>(i % kCvFolds) == fold ? test : train).push_back(order[i]);
    }
    const DesignMatrix tr = subset_rows(d, train);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const LassoFit fit = solve_lasso(tr, grid[k]);
      for (Eigen::Index r : test) {
        const double pred = fit.intercept + d.x.row(r).dot(fit.coef);
        error[k] += (d.y(r) - pred) * (d.y(r) - pred);
      }
    }
  }
  // First minimum: ties resolve toward the stronger penalty.
  return grid[static_cast<std::size_t>(std::min_element(error.begin(), error.end()) - error.begin())];
}

}  // namespace

std::vector<double> kernel_size_pmf(int n) {
  std::vector<double> pmf(static_cast<std::size_t>(n), 0.0);
  double total = 0.0;
  for (int s = 1; s < n; ++s) {
    pmf[static_cast<std::size_t>(s)] = 1.0 / (static_cast<double>(s) * (n - s));
    total += pmf[static_cast<std::size_t>(s)];
  }
  for (double& p : pmf) p /= total > 0 ? total : 1.0;
  return pmf;
}

AttributionVector kernel_shap(const QueryCase& c, UtilityOracle& oracle, const EstimatorSettings& settings) {
  settings.validate();
  if (settings.budget < 2) throw ConfigError("kernel_shap needs a budget of at least 2");
  const int n = c.n();
  const CoalitionMask empty = CoalitionMask::empty(n);
  const CoalitionMask full = CoalitionMask::full(n);
  const std::uint64_t proper = (std::uint64_t{1} << n) - 2;
  const std::uint64_t wanted = std::min<std::uint64_t>(settings.budget - 2, proper);

  // Plan: distinct proper coalitions with their draw counts, in first-draw order.
  std::vector<CoalitionMask> drawn;
  std::unordered_map<std::uint32_t, std::size_t> draws;
  std::size_t total_draws = 0;
  if (wanted == proper) {
    for (std::uint32_t b = 1; b < full.bits(); ++b) {
      drawn.emplace_back(n, b);
      draws[b] = 1;
    }
  } else {
    const auto pmf = kernel_size_pmf(n);
    auto g = rng::make_engine(settings.seed, kKernelStream);
    const std::size_t max_draws = 1000 + 100 * settings.budget;
    while (drawn.size() < wanted && total_draws < max_draws) {
      const CoalitionMask s = sample_of_size(n, static_cast<int>(sample_size(pmf, g)), g);
      ++total_draws;
      if (draws[s.bits()]++ == 0) drawn.push_back(s);
    }
  }

  std::vector<CoalitionMask> plan{empty, full};
  plan.insert(plan.end(), drawn.begin(), drawn.end());
  CoalitionValues values(oracle, c, settings.budget, settings.parallelism);
  values.evaluate(plan);

  AttributionVector out = finish(Method::kKernelShap, c, settings, values);
  const double v_empty = values.value(empty);
  const double total = values.value(full) - v_empty;
  if (n == 1) {
    out.scores = {total};
    return out;
  }
  if (drawn.empty()) {
    out.scores.assign(static_cast<std::size_t>(n), total / n);
    out.low_confidence = true;
    return out;
  }

  // Layers that were sampled completely get the exact kernel weight; the
  // rest get count * (total kernel mass) / draws, an unbiased estimate of it.
  std::map<int, std::size_t> layer_count;
  for (const auto& s : drawn) ++layer_count[s.cardinality()];
  double mass = 0.0;
  for (int s = 1; s < n; ++s) mass += (n - 1.0) / (static_cast<double>(s) * (n - s));

  std::vector<double> targets, weights;
  for (const auto& s : drawn) {
    const int size = s.cardinality();
    const bool complete = static_cast<double>(layer_count[size]) == binomial(n, size);
    targets.push_back(values.value(s) - v_empty);
    weights.push_back(complete ? shap_kernel_weight(n, size)
                               : static_cast<double>(draws[s.bits()]) * mass / static_cast<double>(total_draws));
  }
  const DesignMatrix design = DesignMatrix::from_masks(drawn, targets, weights, false);
  const LinearFit fit = solve_constrained_wls(design, total, true);
  out.scores.assign(fit.coef.data(), fit.coef.data() + fit.coef.size());
  out.low_confidence = fit.rank_deficient;
  return out;
}

AttributionVector context_cite(const QueryCase& c, UtilityOracle& oracle, const EstimatorSettings& settings) {
  settings.validate();
  if (settings.budget < 2) throw ConfigError("context_cite needs a budget of at least 2");
  const int n = c.n();
  const std::uint64_t space = std::uint64_t{1} << n;
  const std::uint64_t wanted = std::min<std::uint64_t>(settings.budget, space);

  auto draw_plan = [&](std::uint64_t stream) {
    auto g = rng::make_engine(settings.seed, stream);
    std::vector<CoalitionMask> rows;
    std::unordered_map<std::uint32_t, bool> seen;
    const std::size_t max_draws = 1000 + 100 * settings.budget;
    while (seen.size() < wanted && rows.size() < max_draws) {
      std::uint32_t bits = 0;
      for (int j = 0; j < n; ++j) {
        if (rng::bernoulli(g, settings.surrogate_mask_prob)) bits |= 1u << j;
      }
      rows.emplace_back(n, bits);
      seen[bits] = true;
    }
    return std::pair{rows, seen.size()};
  };

  auto [rows, distinct] = draw_plan(kSurrogateStream);
  bool degenerate = distinct < 2;
  if (degenerate) {
    std::tie(rows, distinct) = draw_plan(kSurrogateStream + 0x100);
    degenerate = distinct < 2;
  }

  CoalitionValues values(oracle, c, settings.budget, settings.parallelism);
  values.evaluate(rows);
  AttributionVector out = finish(Method::kContextCite, c, settings, values);

  std::vector<double> targets;
  targets.reserve(rows.size());
  for (const auto& s : rows) targets.push_back(values.value(s));
  const DesignMatrix design = DesignMatrix::from_masks(rows, targets);
  const double lambda = settings.lasso_lambda ? *settings.lasso_lambda : cross_validated_lambda(design, settings.seed);
  const LassoFit fit = solve_lasso(design, lambda);
  out.scores.assign(fit.coef.data(), fit.coef.data() + fit.coef.size());
  out.low_confidence = degenerate || !fit.converged;
  return out;
}

}  // namespace ragattr
