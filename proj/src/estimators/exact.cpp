#include <cmath>

#include "ragattr/errors.hpp"
#include "ragattr/estimators.hpp"
#include "ragattr/evaluator.hpp"

namespace ragattr {

std::vector<double> shapley_from_table(int n, std::span<const double> values) {
  const std::size_t size = std::size_t{1} << n;
  if (values.size() != size) throw BoundsError("utility table must have 2^n entries");
  std::vector<double> weight(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) weight[static_cast<std::size_t>(s)] = shapley_weight(n, s);

  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    const std::uint32_t bit = 1u << j;
    double acc = 0.0;
    for (std::uint32_t s = 0; s < size; ++s) {
      if (s & bit) continue;
      acc += weight[static_cast<std::size_t>(std::popcount(s))] * (values[s | bit] - values[s]);
    }
    phi[static_cast<std::size_t>(j)] = acc;
  }
  return phi;
}

AttributionVector exact_shapley(const QueryCase& c, UtilityOracle& oracle, int parallelism) {
  const int n = c.n();
  if (n > kExactMaxPlayers) {
    throw ConfigError("exact Shapley over " + std::to_string(n) + " documents needs 2^" + std::to_string(n) +
                      " evaluations; the limit is " + std::to_string(kExactMaxPlayers) +
                      " documents, use kernel_shap or context_cite instead");
  }
  CoalitionValues values(oracle, c, std::nullopt, parallelism);
  const auto all = enumerate_coalitions(n);
  values.evaluate(all);

  std::vector<double> table(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) table[i] = values.value(all[i]);

  AttributionVector out;
  out.method = Method::kShapley;
  out.case_id = c.case_id;
  out.scores = shapley_from_table(n, table);
  out.oracle_calls = values.calls();
  out.budget = out.oracle_calls;
  return out;
}

AttributionVector leave_one_out(const QueryCase& c, UtilityOracle& oracle, int parallelism) {
  const int n = c.n();
  CoalitionValues values(oracle, c, std::nullopt, parallelism);
  const CoalitionMask full = CoalitionMask::full(n);
  std::vector<CoalitionMask> plan{full};
  for (int j = 0; j < n; ++j) plan.push_back(full.without(j));
  values.evaluate(plan);

  AttributionVector out;
  out.method = Method::kLoo;
  out.case_id = c.case_id;
  const double grand = values.value(full);
  for (int j = 0; j < n; ++j) out.scores.push_back(grand - values.value(full.without(j)));
  out.oracle_calls = values.calls();
  out.budget = out.oracle_calls;
  return out;
}

}  // namespace ragattr
