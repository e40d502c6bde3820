#include "ragattr/evaluator.hpp"

#include <unordered_set>

#include "ragattr/errors.hpp"
#include "ragattr/parallel.hpp"

namespace ragattr {

CoalitionValues::CoalitionValues(UtilityOracle& oracle, const QueryCase& c, std::optional<std::size_t> budget,
                                 int parallelism)
    : oracle_(oracle), case_(c), n_(c.n()), budget_(budget), parallelism_(std::max(parallelism, 1)) {
  c.validate();
}

std::size_t CoalitionValues::remaining() const {
  if (!budget_) return std::numeric_limits<std::size_t>::max();
  return *budget_ > calls() ? *budget_ - calls() : 0;
}

std::size_t CoalitionValues::new_count(std::span<const CoalitionMask> batch) const {
  std::unordered_set<std::uint32_t> fresh;
  for (const auto& s : batch) {
    if (!known(s)) fresh.insert(s.bits());
  }
  return fresh.size();
}

double CoalitionValues::value(CoalitionMask s) {
  if (auto it = values_.find(s.bits()); it != values_.end()) return it->second;
  if (s.n() != n_) throw BoundsError("coalition width does not match document count");
  if (remaining() == 0) throw BudgetExhausted("oracle budget of " + std::to_string(*budget_) + " exhausted");
  const double v = oracle_.utility(case_, s).value;
  values_.emplace(s.bits(), v);
  return v;
}

void CoalitionValues::evaluate(std::span<const CoalitionMask> batch) {
  std::vector<CoalitionMask> fresh;
  std::unordered_set<std::uint32_t> seen;
  for (const auto& s : batch) {
    if (s.n() != n_) throw BoundsError("coalition width does not match document count");
    if (!known(s) && seen.insert(s.bits()).second) fresh.push_back(s);
  }
  if (fresh.size() > remaining()) {
    throw BudgetExhausted("batch of " + std::to_string(fresh.size()) + " new coalitions exceeds remaining budget");
  }
  std::vector<double> out(fresh.size());
  parallel_for(fresh.size(), parallelism_, [&](std::size_t i) { out[i] = oracle_.utility(case_, fresh[i]).value; });
  for (std::size_t i = 0; i < fresh.size(); ++i) values_.emplace(fresh[i].bits(), out[i]);
}

}  // namespace ragattr
