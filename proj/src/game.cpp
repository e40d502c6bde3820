#include "ragattr/game.hpp"

#include <cmath>
#include <string>

#include "ragattr/errors.hpp"
#include "ragattr/random.hpp"

namespace ragattr {

std::string_view to_string(GameKind kind) {
  switch (kind) {
    case GameKind::kAdditive: return "additive";
    case GameKind::kRedundancy: return "redundancy";
    case GameKind::kComplementarity: return "complementarity";
    case GameKind::kSynergy: return "synergy";
  }
  return "additive";
}

GameKind parse_game_kind(std::string_view s) {
  if (s == "additive") return GameKind::kAdditive;
  if (s == "redundancy") return GameKind::kRedundancy;
  if (s == "complementarity") return GameKind::kComplementarity;
  if (s == "synergy") return GameKind::kSynergy;
  throw ConfigError("unknown game kind '" + std::string(s) + "'");
}

void GameSpec::validate() const {
  if (n < 1 || n > kMaxPlayers) throw ConfigError("game player count out of range");
  if (static_cast<int>(weights.size()) != n) {
    throw ConfigError("game has " + std::to_string(weights.size()) + " weights for " + std::to_string(n) +
                      " players");
  }
  if (noise_sigma < 0 || !std::isfinite(noise_sigma)) throw ConfigError("noise_sigma must be >= 0");
  if (kind == GameKind::kAdditive) return;
  const auto [a, b] = pair;
  if (a == b || a < 0 || b < 0 || a >= n || b >= n) throw ConfigError("game pair indices invalid");
  if (!(pair_value > 0)) throw ConfigError("pair_value must be > 0");
  if (weights[a] != 0.0 || weights[b] != 0.0) {
    throw ConfigError("pair members must carry zero background weight");
  }
}

nlohmann::json GameSpec::to_json() const {
  nlohmann::json j{{"kind", to_string(kind)}, {"weights", weights}, {"noise_sigma", noise_sigma},
                   {"noise_seed", noise_seed}};
  if (kind != GameKind::kAdditive) {
    j["pair"] = {pair.first, pair.second};
    j["pair_value"] = pair_value;
  }
  return j;
}

GameSpec GameSpec::from_json(const nlohmann::json& j) {
  try {
    GameSpec g;
    g.kind = parse_game_kind(j.at("kind").get<std::string>());
    g.weights = j.at("weights").get<std::vector<double>>();
    g.n = static_cast<int>(g.weights.size());
    if (j.contains("pair")) g.pair = {j["pair"].at(0).get<int>(), j["pair"].at(1).get<int>()};
    g.pair_value = j.value("pair_value", 1.0);
    g.noise_sigma = j.value("noise_sigma", 0.0);
    g.noise_seed = j.value("noise_seed", std::uint64_t{0});
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed game spec: ") + e.what());
  }
}

GameSpec additive_game(std::vector<double> weights) {
  GameSpec g;
  g.kind = GameKind::kAdditive;
  g.n = static_cast<int>(weights.size());
  g.weights = std::move(weights);
  g.validate();
  return g;
}

double synthetic_utility(const GameSpec& spec, CoalitionMask coalition) {
  if (coalition.n() != spec.n) {
    throw BoundsError("coalition width " + std::to_string(coalition.n()) + " does not match game width " +
                      std::to_string(spec.n));
  }
  double v = 0.0;
  for (int i : coalition.members()) v += spec.weights[static_cast<std::size_t>(i)];

  const bool has_a = coalition.contains(spec.pair.first);
  const bool has_b = coalition.contains(spec.pair.second);
  switch (spec.kind) {
    case GameKind::kAdditive:
      break;
    case GameKind::kRedundancy:
      if (has_a || has_b) v += spec.pair_value;
      break;
    case GameKind::kComplementarity:
      v += 0.5 * spec.pair_value * (static_cast<int>(has_a) + static_cast<int>(has_b));
      break;
    case GameKind::kSynergy:
      if (has_a && has_b) v += spec.pair_value;
      break;
  }
  if (spec.noise_sigma > 0) v += spec.noise_sigma * rng::counter_normal(spec.noise_seed, coalition.bits());
  return v;
}

}  // namespace ragattr
