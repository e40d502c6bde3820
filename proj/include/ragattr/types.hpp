#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ragattr/coalition.hpp"

namespace ragattr {

enum class DocLabel { kRelevant, kHardNegative, kSoftNegative, kUnlabeled };
enum class ScenarioKind { kNone, kRedundancy, kComplementarity, kSynergy };

std::string_view to_string(DocLabel label);
std::string_view to_string(ScenarioKind kind);
DocLabel parse_doc_label(std::string_view s);
ScenarioKind parse_scenario_kind(std::string_view s);

struct Document {
  std::string doc_id;
  std::string text;
  DocLabel label = DocLabel::kUnlabeled;
  nlohmann::json extra = nlohmann::json::object();  // unrecognized fields, kept on round trip

  friend bool operator==(const Document&, const Document&) = default;
};

// One attribution instance: the query, its ordered retrieved documents and
// the fixed response whose likelihood is the utility.
struct QueryCase {
  std::string case_id;
  std::string query;
  std::vector<Document> documents;
  std::optional<std::string> target_response;
  ScenarioKind scenario = ScenarioKind::kNone;
  // (A, B): A is the first-authored positive, B the second, wherever they sit.
  std::optional<std::pair<int, int>> positive_pair;
  nlohmann::json extra = nlohmann::json::object();

  int n() const { return static_cast<int>(documents.size()); }

  // Throws ConfigError on an empty document text, an invalid pair, or a
  // document count outside [1, kMaxPlayers].
  void validate() const;

  friend bool operator==(const QueryCase&, const QueryCase&) = default;
};

struct UtilityRecord {
  std::string case_id;
  std::string model_id;
  CoalitionMask coalition;
  double value = 0.0;  // nats for log-probability oracles
  std::int64_t token_count = 0;
};

enum class Method { kShapley, kLoo, kTmc, kBeta, kKernelShap, kContextCite };

std::string_view to_string(Method m);
// Throws ConfigError for unknown names.
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();
bool is_budgeted(Method m);

struct AttributionVector {
  Method method = Method::kShapley;
  std::string case_id;
  std::vector<double> scores;
  std::size_t budget = 0;
  std::size_t oracle_calls = 0;
  std::uint64_t seed = 0;
  bool low_confidence = false;

  nlohmann::json to_json() const;
};

// Document indices by descending score, ties by ascending index.
std::vector<int> rank_order(const std::vector<double>& scores);

}  // namespace ragattr
