#include "ragattr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ragattr/errors.hpp"
#include "ragattr/estimators.hpp"
#include "ragattr/evaluator.hpp"

namespace ragattr {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw BoundsError("score vectors differ in length");
  if (a.size() < 2) throw BoundsError("correlation needs at least two elements");
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) throw UndefinedCorrelation("correlation of a constant vector is undefined");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double spearman(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson(ra, rb);
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  double concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0 && db == 0) continue;
      if (da == 0) {
        ++ties_a;
      } else if (db == 0) {
        ++ties_b;
      } else if ((da > 0) == (db > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double denom = std::sqrt((concordant + discordant + ties_a) * (concordant + discordant + ties_b));
  if (denom == 0) throw UndefinedCorrelation("tau-b of an all-tied vector is undefined");
  return std::clamp((concordant - discordant) / denom, -1.0, 1.0);
}

CoalitionMask top_k(std::span<const double> scores, int k) {
  const int n = static_cast<int>(scores.size());
  if (k < 1 || k > n) throw BoundsError("k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  const auto order = rank_order(std::vector<double>(scores.begin(), scores.end()));
  CoalitionMask m = CoalitionMask::empty(n);
  for (int i = 0; i < k; ++i) m = m.with(order[static_cast<std::size_t>(i)]);
  return m;
}

double precision_at_k(std::span<const double> pred, std::span<const double> ref, int k) {
  if (pred.size() != ref.size()) throw BoundsError("score vectors differ in length");
  return (top_k(pred, k) & top_k(ref, k)).cardinality() / static_cast<double>(k);
}

double precision_at_k(std::span<const double> pred, CoalitionMask reference) {
  const int k = reference.cardinality();
  if (reference.n() != static_cast<int>(pred.size())) throw BoundsError("reference set width mismatch");
  return (top_k(pred, k) & reference).cardinality() / static_cast<double>(k);
}

ImpactSet exhaustive_impact_set(const QueryCase& c, UtilityOracle& oracle, int k, int parallelism) {
  const int n = c.n();
  if (n > kExactMaxPlayers) {
    throw ConfigError("exhaustive impact search is limited to " + std::to_string(kExactMaxPlayers) + " documents");
  }
  const auto subsets = enumerate_k_subsets(n, k);
  const CoalitionMask full = CoalitionMask::full(n);
  std::vector<CoalitionMask> plan{full};
  for (const auto& s : subsets) plan.push_back(full - s);
  CoalitionValues values(oracle, c, std::nullopt, parallelism);
  values.evaluate(plan);

  const double grand = values.value(full);
  ImpactSet best{c.case_id, k, subsets.front(), grand - values.value(full - subsets.front())};
  for (const auto& s : subsets) {
    const double drop = grand - values.value(full - s);
    if (drop > best.drop) best = {c.case_id, k, s, drop};
  }
  return best;
}

}  // namespace ragattr
