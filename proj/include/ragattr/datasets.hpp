#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ragattr/game.hpp"
#include "ragattr/types.hpp"

namespace ragattr {

// Case file: one JSON object per line,
//   {"id", "query", "documents": [{"id", "text", "label"}], "target_response"?,
//    "scenario"?, "positive_pair"?: [a, b], ...}
// Unknown fields are carried in QueryCase::extra / Document::extra and
// written back unchanged.
QueryCase case_from_json(const nlohmann::json& j, std::size_t line = 0);
nlohmann::ordered_json case_to_json(const QueryCase& c);

// Throws ParseError naming the line (and the field, when one is missing) and
// on duplicate case ids.
std::vector<QueryCase> load_cases(const std::filesystem::path& path);
std::vector<QueryCase> parse_cases(std::istream& in);
std::string format_cases(const std::vector<QueryCase>& cases);
void save_cases(const std::filesystem::path& path, const std::vector<QueryCase>& cases);

struct ScenarioTemplate {
  ScenarioKind kind = ScenarioKind::kSynergy;
  std::vector<std::string> places;     // fictional countries
  std::vector<std::string> names;      // fictional people
  std::vector<std::string> artifacts;  // fictional cities, ships, objects
  std::uint64_t rng_seed = 0;

  // Built-in fictional lexicons.
  static ScenarioTemplate with_default_lexicon(ScenarioKind kind, std::uint64_t seed);
};

// `count` cases per order variant: for each scenario an "AB" case with
// positive A at positions.first and B at positions.second, then a "BA" case
// with the two swapped. Remaining slots hold hard negatives in a fixed
// order. Throws ConfigError when the lexicon cannot supply `count`
// distinct scenarios.
std::vector<QueryCase> generate_scenario_cases(const ScenarioTemplate& tmpl, int count, int n_docs = 10,
                                               std::pair<int, int> positions = {0, 1});

// Game matching the case's scenario tag over its positive pair. Pair members'
// background weights are forced to zero. Throws ConfigError for untagged
// cases or cases without a pair.
GameSpec attach_synthetic_game(const QueryCase& c, std::vector<double> weights, double pair_value = 1.0,
                               double noise_sigma = 0.0, std::uint64_t noise_seed = 0);

}  // namespace ragattr
