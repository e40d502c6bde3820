#pragma once

#include <span>
#include <vector>

#include "ragattr/oracle.hpp"
#include "ragattr/types.hpp"

namespace ragattr {

// 1-based ranks in ascending order of value; tied values share their average rank.
std::vector<double> average_ranks(std::span<const double> x);

// Throw UndefinedCorrelation when either input is constant, BoundsError on
// length mismatch or fewer than two elements.
double pearson(std::span<const double> a, std::span<const double> b);
double spearman(std::span<const double> a, std::span<const double> b);
// Tie-corrected tau-b.
double kendall_tau(std::span<const double> a, std::span<const double> b);

// Indices of the k highest scores, ties broken by ascending index.
CoalitionMask top_k(std::span<const double> scores, int k);

// |top_k(pred) intersect top_k(ref)| / k.
double precision_at_k(std::span<const double> pred, std::span<const double> ref, int k);
// |top_k(pred) intersect reference| / k, with |reference| = k.
double precision_at_k(std::span<const double> pred, CoalitionMask reference);

struct ImpactSet {
  std::string case_id;
  int k = 0;
  CoalitionMask members;
  double drop = 0.0;  // v(D) - v(D \ members)
};

// Brute-force argmax over all k-subsets S of v(D) - v(D \ S); ties go to the
// smallest mask integer. Refuses n above kExactMaxPlayers.
ImpactSet exhaustive_impact_set(const QueryCase& c, UtilityOracle& oracle, int k, int parallelism = 1);

}  // namespace ragattr
