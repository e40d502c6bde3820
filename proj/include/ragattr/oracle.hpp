#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>

#include "ragattr/cache.hpp"
#include "ragattr/game.hpp"
#include "ragattr/scoring_client.hpp"
#include "ragattr/types.hpp"

namespace ragattr {

enum class OracleKind { kRemoteLlm, kSynthetic };

std::string_view to_string(OracleKind k);
OracleKind parse_oracle_kind(std::string_view s);

struct OracleConfig {
  OracleKind kind = OracleKind::kSynthetic;
  std::string model_id = "synthetic";
  std::string endpoint_url;
  std::string prompt_template_id = "default";
  int max_parallel = 1;
  std::filesystem::path cache_path;
  // Name of the environment variable holding the API key; the key itself is
  // never stored.
  std::string credential_env;
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::milliseconds max_backoff{30000};
  int max_response_tokens = 256;

  void validate() const;
  // Value of credential_env, empty when unset or unnamed.
  std::string credential() const;
};

// v(S) for a case. Implementations must tolerate concurrent calls.
class UtilityOracle {
 public:
  virtual ~UtilityOracle() = default;
  virtual UtilityRecord utility(const QueryCase& c, CoalitionMask coalition) = 0;
  virtual std::string model_id() const = 0;
};

// Pure synthetic games, one per case id.
class SyntheticOracle : public UtilityOracle {
 public:
  explicit SyntheticOracle(std::string model_id = "synthetic") : model_id_(std::move(model_id)) {}

  void set_game(const std::string& case_id, GameSpec game);
  const GameSpec& game(const std::string& case_id) const;
  bool has_game(const std::string& case_id) const;

  UtilityRecord utility(const QueryCase& c, CoalitionMask coalition) override;
  std::string model_id() const override { return model_id_; }

 private:
  std::string model_id_;
  std::map<std::string, GameSpec> games_;
};

// Teacher-forced log-likelihood of case.target_response given the query and
// the documents in the coalition. Transport errors are retried with
// exponential backoff up to config.max_retries before surfacing.
class RemoteOracle : public UtilityOracle {
 public:
  RemoteOracle(OracleConfig config, ContinuationScorer& scorer);

  UtilityRecord utility(const QueryCase& c, CoalitionMask coalition) override;
  std::string model_id() const override { return config_.model_id; }

 private:
  OracleConfig config_;
  ContinuationScorer& scorer_;
};

// Fronts another oracle with a UtilityCache; the inner oracle runs at most
// once per (case, model, coalition).
class CachedOracle : public UtilityOracle {
 public:
  CachedOracle(UtilityOracle& inner, UtilityCache& cache) : inner_(inner), cache_(cache) {}

  UtilityRecord utility(const QueryCase& c, CoalitionMask coalition) override;
  std::string model_id() const override { return inner_.model_id(); }

  // Evaluations forwarded to the inner oracle.
  std::size_t misses() const { return misses_.load(); }

 private:
  UtilityOracle& inner_;
  UtilityCache& cache_;
  std::atomic<std::size_t> misses_{0};
};

// Forwards to another oracle and counts calls per coalition.
class CountingOracle : public UtilityOracle {
 public:
  explicit CountingOracle(UtilityOracle& inner) : inner_(inner) {}

  UtilityRecord utility(const QueryCase& c, CoalitionMask coalition) override;
  std::string model_id() const override { return inner_.model_id(); }

  std::size_t calls() const;
  std::size_t distinct_calls() const;
  std::size_t max_calls_per_coalition() const;
  void reset();

 private:
  UtilityOracle& inner_;
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::uint32_t>, std::size_t> counts_;
  std::size_t total_ = 0;
};

// Runs fn, retrying on TransportError with exponential backoff.
template <typename Fn>
auto with_retries(const OracleConfig& config, Fn&& fn) -> decltype(fn());

// Fills case.target_response by greedy decoding over the full document set.
// A case that already has a response is left untouched and costs no call.
// Throws ConfigError for synthetic oracles.
const std::string& generate_target_response(QueryCase& c, const OracleConfig& config, TextGenerator* generator);

}  // namespace ragattr

#include "ragattr/detail/retry.hpp"
