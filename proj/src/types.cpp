#include "ragattr/types.hpp"

#include <algorithm>
#include <numeric>

#include "ragattr/errors.hpp"

namespace ragattr {

std::string_view to_string(DocLabel label) {
  switch (label) {
    case DocLabel::kRelevant: return "relevant";
    case DocLabel::kHardNegative: return "hard_negative";
    case DocLabel::kSoftNegative: return "soft_negative";
    case DocLabel::kUnlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kNone: return "none";
    case ScenarioKind::kRedundancy: return "redundancy";
    case ScenarioKind::kComplementarity: return "complementarity";
    case ScenarioKind::kSynergy: return "synergy";
  }
  return "none";
}

DocLabel parse_doc_label(std::string_view s) {
  if (s == "relevant") return DocLabel::kRelevant;
  if (s == "hard_negative") return DocLabel::kHardNegative;
  if (s == "soft_negative") return DocLabel::kSoftNegative;
  if (s == "unlabeled") return DocLabel::kUnlabeled;
  throw ConfigError("unknown document label '" + std::string(s) + "'");
}

ScenarioKind parse_scenario_kind(std::string_view s) {
  if (s == "none") return ScenarioKind::kNone;
  if (s == "redundancy") return ScenarioKind::kRedundancy;
  if (s == "complementarity") return ScenarioKind::kComplementarity;
  if (s == "synergy") return ScenarioKind::kSynergy;
  throw ConfigError("unknown scenario '" + std::string(s) + "'");
}

void QueryCase::validate() const {
  if (documents.empty() || n() > kMaxPlayers) {
    throw ConfigError("case '" + case_id + "' has " + std::to_string(n()) +
                      " documents; supported range is 1.." + std::to_string(kMaxPlayers));
  }
  for (const auto& d : documents) {
    if (d.text.empty()) throw ConfigError("case '" + case_id + "': document '" + d.doc_id + "' has empty text");
  }
  if (positive_pair) {
    const auto [a, b] = *positive_pair;
    if (a == b || a < 0 || b < 0 || a >= n() || b >= n()) {
      throw ConfigError("case '" + case_id + "': invalid positive_pair (" + std::to_string(a) + ", " +
                        std::to_string(b) + ") for " + std::to_string(n()) + " documents");
    }
  }
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kShapley: return "shapley";
    case Method::kLoo: return "loo";
    case Method::kTmc: return "tmc";
    case Method::kBeta: return "beta";
    case Method::kKernelShap: return "kernel_shap";
    case Method::kContextCite: return "context_cite";
  }
  return "shapley";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {Method::kShapley, Method::kLoo,        Method::kTmc,
                                              Method::kBeta,    Method::kKernelShap, Method::kContextCite};
  return methods;
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods()) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown attribution method '" + std::string(name) +
                    "' (expected shapley, loo, tmc, beta, kernel_shap or context_cite)");
}

bool is_budgeted(Method m) { return m != Method::kShapley && m != Method::kLoo; }

nlohmann::json AttributionVector::to_json() const {
  return nlohmann::json{{"method", to_string(method)},
                        {"case_id", case_id},
                        {"scores", scores},
                        {"budget", budget},
                        {"oracle_calls", oracle_calls},
                        {"seed", seed},
                        {"low_confidence", low_confidence}};
}

std::vector<int> rank_order(const std::vector<double>& scores) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  return idx;
}

}  // namespace ragattr
