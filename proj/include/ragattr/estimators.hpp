#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ragattr/oracle.hpp"
#include "ragattr/types.hpp"

namespace ragattr {

inline constexpr int kExactMaxPlayers = 20;

struct EstimatorSettings {
  // Distinct coalition evaluations allowed, v(empty) and v(D) included.
  std::size_t budget = 100;
  std::uint64_t seed = 0;
  // A permutation scan stops once |v(prefix) - v(D)| < tol * |v(D) - v(empty)|.
  double tmc_truncation_tol = 0.01;
  double beta_alpha = 0.5;
  double beta_beta = 0.5;
  std::optional<double> lasso_lambda;  // unset: 5-fold cross-validation
  double surrogate_mask_prob = 0.5;
  // Upper bound on sampled marginal contributions for tmc and beta, which
  // matters once the budget covers every coalition.
  std::size_t max_marginals = 20000;
  int parallelism = 1;

  void validate() const;
};

// Exact Shapley values from all 2^n utilities. Throws ConfigError above
// kExactMaxPlayers.
AttributionVector exact_shapley(const QueryCase& c, UtilityOracle& oracle, int parallelism = 1);

// phi_j = v(D) - v(D \ {j}).
AttributionVector leave_one_out(const QueryCase& c, UtilityOracle& oracle, int parallelism = 1);

// Truncated Monte Carlo permutation sampling. Permutations are scanned in
// order until one no longer fits the budget; only complete scans are
// averaged. If none completes, the partial scan is returned with
// low_confidence set.
AttributionVector tmc_shapley(const QueryCase& c, UtilityOracle& oracle, const EstimatorSettings& settings);

// Beta(alpha, beta) semivalue. Players are visited round-robin; each sample
// draws a size from beta_size_pmf and a uniform coalition of that size
// among the other players. Scores are per-player means of the marginals.
AttributionVector beta_shapley(const QueryCase& c, UtilityOracle& oracle, const EstimatorSettings& settings);

// Efficiency-constrained weighted regression on SHAP-kernel sampled
// coalitions. Layers (coalition sizes) that end up fully sampled carry their
// exact kernel weights; partially sampled layers carry draw-count estimates
// of them. A budget covering all 2^n coalitions reproduces exact Shapley.
AttributionVector kernel_shap(const QueryCase& c, UtilityOracle& oracle, const EstimatorSettings& settings);

// Lasso surrogate on random masks keeping each document with probability
// surrogate_mask_prob.
AttributionVector context_cite(const QueryCase& c, UtilityOracle& oracle, const EstimatorSettings& settings);

AttributionVector run_method(Method method, const QueryCase& c, UtilityOracle& oracle,
                             const EstimatorSettings& settings);
AttributionVector run_method(std::string_view method, const QueryCase& c, UtilityOracle& oracle,
                             const EstimatorSettings& settings);

// Shapley values from a full table of utilities indexed by coalition bits.
std::vector<double> shapley_from_table(int n, std::span<const double> values);

// Probability that a Beta(alpha, beta) semivalue sample has coalition size
// s, s = 0..n-1 (a beta-binomial law). Uniform for alpha = beta = 1.
std::vector<double> beta_size_pmf(int n, double alpha, double beta);

// Probability of size s = 1..n-1 under the SHAP kernel (index 0 unused).
std::vector<double> kernel_size_pmf(int n);

}  // namespace ragattr
