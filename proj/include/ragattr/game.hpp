#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ragattr/coalition.hpp"

namespace ragattr {

enum class GameKind { kAdditive, kRedundancy, kComplementarity, kSynergy };

std::string_view to_string(GameKind kind);
GameKind parse_game_kind(std::string_view s);

// Synthetic cooperative game with a known structure: an additive background
// plus one interacting pair.
//
//   v(S) = sum_{i in S} weights[i] + pair_term(S) + noise(S)
//
//   additive:        pair_term = 0
//   redundancy:      r if a or b in S
//   complementarity: r/2 for each of a, b in S
//   synergy:         r if a and b in S
//
// noise(S) ~ N(0, noise_sigma^2), a pure function of (noise_seed, S).
struct GameSpec {
  GameKind kind = GameKind::kAdditive;
  int n = 0;
  std::vector<double> weights;
  std::pair<int, int> pair{0, 1};
  double pair_value = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;

  // Throws ConfigError when the invariants do not hold.
  void validate() const;

  nlohmann::json to_json() const;
  static GameSpec from_json(const nlohmann::json& j);
};

GameSpec additive_game(std::vector<double> weights);

double synthetic_utility(const GameSpec& spec, CoalitionMask coalition);

}  // namespace ragattr
