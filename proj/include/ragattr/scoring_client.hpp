#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <json.hpp>

namespace ragattr {

// Per-token log-probabilities of a supplied continuation, teacher-forced.
struct TokenScores {
  std::vector<std::string> tokens;
  std::vector<double> logprobs;
};

// Internal scoring contract. Implementations must be safe to call concurrently.
class ContinuationScorer {
 public:
  virtual ~ContinuationScorer() = default;
  virtual TokenScores score(const std::string& model, const std::string& prompt,
                            const std::string& continuation) = 0;
};

// Greedy (temperature 0) completion.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual std::string generate(const std::string& model, const std::string& prompt, int max_tokens) = 0;
};

// Wire format of the scoring contract:
//   request  {"model": str, "prompt": str, "continuation": str}
//   response {"tokens": [str], "logprobs": [number]}
nlohmann::json make_score_request(const std::string& model, const std::string& prompt,
                                  const std::string& continuation);
// Throws CapabilityError when logprobs are absent, non-numeric, or do not
// line up with tokens.
TokenScores parse_score_response(const nlohmann::json& body);

//   request  {"model": str, "prompt": str, "max_tokens": int, "temperature": 0}
//   response {"text": str}
nlohmann::json make_generate_request(const std::string& model, const std::string& prompt, int max_tokens);
std::string parse_generate_response(const nlohmann::json& body);

struct HttpClientOptions {
  // Scheme, host, port and optional path prefix, e.g. "http://localhost:8080/v1".
  // Scoring is POSTed to <prefix>/score, generation to <prefix>/generate.
  std::string base_url;
  std::string api_key;  // sent as a bearer token when non-empty
  std::chrono::seconds timeout{120};
};

// JSON-over-HTTP adapter for the two contracts above. Maps failures onto the
// oracle error taxonomy: connection failures, 429 and 5xx raise
// TransportError; 413 or a context-length complaint raises InputTooLongError;
// other client errors raise CapabilityError (401/403 raise ConfigError).
class HttpScoringClient : public ContinuationScorer, public TextGenerator {
 public:
  explicit HttpScoringClient(HttpClientOptions options);

  TokenScores score(const std::string& model, const std::string& prompt, const std::string& continuation) override;
  std::string generate(const std::string& model, const std::string& prompt, int max_tokens) override;

 private:
  nlohmann::json post(const std::string& route, const nlohmann::json& body);

  HttpClientOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

}  // namespace ragattr
