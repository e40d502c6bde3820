#pragma once

#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ragattr/oracle.hpp"

namespace ragattr {

// One estimator run's view of the utility oracle for a single case.
// Memoizes v(S), counts distinct coalitions requested (the run's oracle
// calls) and refuses to exceed the budget. Batches are evaluated
// concurrently; results do not depend on the degree of parallelism.
class CoalitionValues {
 public:
  CoalitionValues(UtilityOracle& oracle, const QueryCase& c, std::optional<std::size_t> budget = std::nullopt,
                  int parallelism = 1);

  int n() const { return n_; }
  const QueryCase& query_case() const { return case_; }
  std::size_t calls() const { return values_.size(); }
  std::size_t remaining() const;

  bool known(CoalitionMask s) const { return values_.contains(s.bits()); }
  // Distinct masks in `batch` that have not been evaluated yet.
  std::size_t new_count(std::span<const CoalitionMask> batch) const;
  bool affordable(std::span<const CoalitionMask> batch) const { return new_count(batch) <= remaining(); }

  // Throws BudgetExhausted when s is new and the budget is spent.
  double value(CoalitionMask s);
  // Evaluates every new mask in the batch; throws BudgetExhausted without
  // calling the oracle if the batch does not fit.
  void evaluate(std::span<const CoalitionMask> batch);

 private:
  UtilityOracle& oracle_;
  const QueryCase& case_;
  int n_;
  std::optional<std::size_t> budget_;
  int parallelism_;
  std::unordered_map<std::uint32_t, double> values_;
};

}  // namespace ragattr
