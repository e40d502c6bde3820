#include "ragattr/oracle.hpp"

#include <cstdlib>
#include <numeric>

#include "ragattr/errors.hpp"
#include "ragattr/prompt.hpp"

namespace ragattr {

std::string_view to_string(OracleKind k) { return k == OracleKind::kRemoteLlm ? "remote_llm" : "synthetic"; }

OracleKind parse_oracle_kind(std::string_view s) {
  if (s == "remote_llm") return OracleKind::kRemoteLlm;
  if (s == "synthetic") return OracleKind::kSynthetic;
  throw ConfigError("unknown oracle kind '" + std::string(s) + "' (expected remote_llm or synthetic)");
}

void OracleConfig::validate() const {
  if (max_parallel < 1) throw ConfigError("max_parallel must be >= 1");
  if (model_id.empty()) throw ConfigError("model_id must be non-empty");
  if (kind != OracleKind::kRemoteLlm) return;
  if (endpoint_url.empty()) throw ConfigError("remote oracle requires an endpoint URL");
  if (!credential_env.empty() && std::getenv(credential_env.c_str()) == nullptr) {
    throw ConfigError("credential environment variable '" + credential_env + "' is not set");
  }
}

std::string OracleConfig::credential() const {
  if (credential_env.empty()) return {};
  const char* v = std::getenv(credential_env.c_str());
  return v ? std::string(v) : std::string();
}

void SyntheticOracle::set_game(const std::string& case_id, GameSpec game) {
  game.validate();
  games_[case_id] = std::move(game);
}

const GameSpec& SyntheticOracle::game(const std::string& case_id) const {
  auto it = games_.find(case_id);
  if (it == games_.end()) throw ConfigError("no synthetic game registered for case '" + case_id + "'");
  return it->second;
}

bool SyntheticOracle::has_game(const std::string& case_id) const { return games_.contains(case_id); }

UtilityRecord SyntheticOracle::utility(const QueryCase& c, CoalitionMask coalition) {
  const GameSpec& g = game(c.case_id);
  if (coalition.n() != c.n()) throw BoundsError("coalition width does not match document count");
  return {c.case_id, model_id_, coalition, synthetic_utility(g, coalition), 0};
}

RemoteOracle::RemoteOracle(OracleConfig config, ContinuationScorer& scorer)
    : config_(std::move(config)), scorer_(scorer) {
  if (config_.kind != OracleKind::kRemoteLlm) throw ConfigError("RemoteOracle needs a remote_llm config");
  config_.validate();
}

UtilityRecord RemoteOracle::utility(const QueryCase& c, CoalitionMask coalition) {
  if (!c.target_response) {
    throw ConfigError("case '" + c.case_id + "' has no target response; generate one first");
  }
  if (coalition.n() != c.n()) throw BoundsError("coalition width does not match document count");
  const std::string prompt = build_prompt(c, coalition, config_.prompt_template_id);
  const TokenScores scores =
      with_retries(config_, [&] { return scorer_.score(config_.model_id, prompt, *c.target_response); });
  const double value = std::accumulate(scores.logprobs.begin(), scores.logprobs.end(), 0.0);
  return {c.case_id, config_.model_id, coalition, value, static_cast<std::int64_t>(scores.logprobs.size())};
}

UtilityRecord CachedOracle::utility(const QueryCase& c, CoalitionMask coalition) {
  const CacheKey key{c.case_id, inner_.model_id(), coalition.bits()};
  const CacheEntry e = cache_.get_or_compute(key, [&] {
    ++misses_;
    const UtilityRecord r = inner_.utility(c, coalition);
    return CacheEntry{r.value, r.token_count};
  });
  return {c.case_id, inner_.model_id(), coalition, e.value, e.token_count};
}

UtilityRecord CountingOracle::utility(const QueryCase& c, CoalitionMask coalition) {
  {
    std::lock_guard lock(mu_);
    ++counts_[{c.case_id, coalition.bits()}];
    ++total_;
  }
  return inner_.utility(c, coalition);
}

std::size_t CountingOracle::calls() const {
  std::lock_guard lock(mu_);
  return total_;
}

std::size_t CountingOracle::distinct_calls() const {
  std::lock_guard lock(mu_);
  return counts_.size();
}

std::size_t CountingOracle::max_calls_per_coalition() const {
  std::lock_guard lock(mu_);
  std::size_t m = 0;
  for (const auto& [k, v] : counts_) m = std::max(m, v);
  return m;
}

void CountingOracle::reset() {
  std::lock_guard lock(mu_);
  counts_.clear();
  total_ = 0;
}

const std::string& generate_target_response(QueryCase& c, const OracleConfig& config, TextGenerator* generator) {
  if (c.target_response) return *c.target_response;
  if (config.kind != OracleKind::kRemoteLlm || generator == nullptr) {
    throw ConfigError("generation requires remote oracle");
  }
  const std::string prompt = build_prompt(c, CoalitionMask::full(c.n()), config.prompt_template_id);
  c.target_response = with_retries(
      config, [&] { return generator->generate(config.model_id, prompt, config.max_response_tokens); });
  return *c.target_response;
}

}  // namespace ragattr
