#include <cmath>
#include <numeric>
#include <unordered_set>

#include "ragattr/errors.hpp"
#include "ragattr/estimators.hpp"
#include "ragattr/evaluator.hpp"
#include "ragattr/random.hpp"

namespace ragattr {

namespace {

// Stream ids keep each estimator's random sequence independent of the others
// for the same seed.
constexpr std::uint64_t kTmcStream = 1;
constexpr std::uint64_t kBetaStream = 2;

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

std::size_t sample_index(const std::vector<double>& pmf, rng::Engine& g) {
  const double u = rng::uniform01(g);
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf[i];
    if (u < acc) return i;
  }
  // Rounding left u beyond the accumulated mass; take the last non-empty cell.
  for (std::size_t i = pmf.size(); i-- > 0;) {
    if (pmf[i] > 0) return i;
  }
  return 0;
}

// Uniform subset of `size` players from `pool` (partial Fisher-Yates).
CoalitionMask sample_subset(int n, std::vector<int> pool, int size, rng::Engine& g) {
  std::uint32_t bits = 0;
  for (int k = 0; k < size; ++k) {
    const auto pick = static_cast<std::size_t>(k) +
                      static_cast<std::size_t>(rng::uniform_below(g, pool.size() - static_cast<std::size_t>(k)));
    std::swap(pool[static_cast<std::size_t>(k)], pool[pick]);
    bits |= 1u << pool[static_cast<std::size_t>(k)];
  }
  return CoalitionMask(n, bits);
}

void check_budget(const EstimatorSettings& s) {
  s.validate();
  if (s.budget < 2) throw ConfigError("budget must be at least 2");
}

}  // namespace

void EstimatorSettings::validate() const {
  if (!(tmc_truncation_tol >= 0) || !std::isfinite(tmc_truncation_tol)) {
    throw ConfigError("tmc_truncation_tol must be >= 0");
  }
  if (!(beta_alpha > 0) || !(beta_beta > 0) || !std::isfinite(beta_alpha) || !std::isfinite(beta_beta)) {
    throw ConfigError("beta parameters must be positive and finite");
  }
  if (lasso_lambda && !(*lasso_lambda >= 0)) throw ConfigError("lasso_lambda must be >= 0");
  if (!(surrogate_mask_prob > 0 && surrogate_mask_prob < 1)) {
    throw ConfigError("surrogate_mask_prob must lie in (0, 1)");
  }
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
}

std::vector<double> beta_size_pmf(int n, double alpha, double beta) {
  if (!(alpha > 0) || !(beta > 0)) throw ConfigError("beta parameters must be positive");
  if (n < 1) throw BoundsError("player count must be >= 1");
  std::vector<double> pmf(static_cast<std::size_t>(n));
  const double norm = log_beta(alpha, beta);
  for (int s = 0; s < n; ++s) {
    pmf[static_cast<std::size_t>(s)] =
        binomial(n - 1, s) * std::exp(log_beta(s + beta, n - 1 - s + alpha) - norm);
  }
  const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  for (double& p : pmf) p /= total;
  return pmf;
}

AttributionVector tmc_shapley(const QueryCase& c, UtilityOracle& oracle, const EstimatorSettings& settings) {
  check_budget(settings);
  const int n = c.n();
  CoalitionValues values(oracle, c, settings.budget, settings.parallelism);
  const CoalitionMask empty = CoalitionMask::empty(n);
  const CoalitionMask full = CoalitionMask::full(n);
  const std::vector<CoalitionMask> anchors{empty, full};
  values.evaluate(anchors);
  const double v_empty = values.value(empty);
  const double v_full = values.value(full);
  const double threshold = settings.tmc_truncation_tol * std::abs(v_full - v_empty);

  auto g = rng::make_engine(settings.seed, kTmcStream);
  const std::size_t max_perms = std::max<std::size_t>(1, settings.max_marginals / static_cast<std::size_t>(n));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
  std::vector<double> partial(static_cast<std::size_t>(n), 0.0);
  std::size_t complete = 0;
  bool stopped = false;

  for (std::size_t p = 0; p < max_perms && !stopped; ++p) {
    rng::shuffle(order.begin(), order.end(), g);
    std::vector<double> marginal(static_cast<std::size_t>(n), 0.0);
    CoalitionMask prefix = empty;
    double prev = v_empty;
    for (int player : order) {
      if (settings.tmc_truncation_tol > 0 && std::abs(prev - v_full) < threshold) break;
      const CoalitionMask next = prefix.with(player);
      if (next != full && !values.known(next) && values.remaining() == 0) {
        stopped = true;
        break;
      }
      const double v = next == full ? v_full : values.value(next);
      marginal[static_cast<std::size_t>(player)] = v - prev;
      prev = v;
      prefix = next;
    }
    if (stopped) {
      partial = marginal;
      break;
    }
    for (int j = 0; j < n; ++j) sum[static_cast<std::size_t>(j)] += marginal[static_cast<std::size_t>(j)];
    ++complete;
  }

  AttributionVector out;
  out.method = Method::kTmc;
  out.case_id = c.case_id;
  out.budget = settings.budget;
  out.seed = settings.seed;
  if (complete == 0) {
    out.scores = partial;
    out.low_confidence = true;
  } else {
    out.scores = sum;
    for (double& s : out.scores) s /= static_cast<double>(complete);
  }
  out.oracle_calls = values.calls();
  return out;
}

AttributionVector beta_shapley(const QueryCase& c, UtilityOracle& oracle, const EstimatorSettings& settings) {
  check_budget(settings);
  const int n = c.n();
  const auto pmf = beta_size_pmf(n, settings.beta_alpha, settings.beta_beta);
  auto g = rng::make_engine(settings.seed, kBetaStream);

  struct Sample {
    int player;
    CoalitionMask without;
  };
  std::vector<Sample> plan;
  std::vector<CoalitionMask> masks;
  std::unordered_set<std::uint32_t> planned;
  std::vector<int> others;
  others.reserve(static_cast<std::size_t>(n));

  for (std::size_t t = 0; t < settings.max_marginals; ++t) {
    const int j = static_cast<int>(t % static_cast<std::size_t>(n));
    const int size = static_cast<int>(sample_index(pmf, g));
    others.clear();
    for (int i = 0; i < n; ++i) {
      if (i != j) others.push_back(i);
    }
    const CoalitionMask s = sample_subset(n, others, size, g);
    const CoalitionMask with = s.with(j);
    const std::size_t cost = static_cast<std::size_t>(!planned.contains(s.bits())) +
                             static_cast<std::size_t>(!planned.contains(with.bits()));
    if (planned.size() + cost > settings.budget) break;
    planned.insert(s.bits());
    planned.insert(with.bits());
    plan.push_back({j, s});
    masks.push_back(s);
    masks.push_back(with);
  }

  CoalitionValues values(oracle, c, settings.budget, settings.parallelism);
  values.evaluate(masks);

  std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
  std::vector<std::size_t> count(static_cast<std::size_t>(n), 0);
  for (const auto& sample : plan) {
    const auto j = static_cast<std::size_t>(sample.player);
    sum[j] += values.value(sample.without.with(sample.player)) - values.value(sample.without);
    ++count[j];
  }

  AttributionVector out;
  out.method = Method::kBeta;
  out.case_id = c.case_id;
  out.budget = settings.budget;
  out.seed = settings.seed;
  out.scores.assign(static_cast<std::size_t>(n), 0.0);
  for (std::size_t j = 0; j < sum.size(); ++j) {
    if (count[j] == 0) {
      out.low_confidence = true;
    } else {
      out.scores[j] = sum[j] / static_cast<double>(count[j]);
    }
  }
  out.oracle_calls = values.calls();
  return out;
}

}  // namespace ragattr
