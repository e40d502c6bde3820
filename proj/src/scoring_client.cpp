#include "ragattr/scoring_client.hpp"

#include <algorithm>
#include <cctype>

#ifdef RAGATTR_HTTPS
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "ragattr/errors.hpp"

namespace ragattr {

namespace {

bool mentions_length_limit(std::string body) {
  std::transform(body.begin(), body.end(), body.begin(), [](unsigned char c) { return std::tolower(c); });
  return body.find("too long") != std::string::npos || body.find("context length") != std::string::npos ||
         body.find("maximum context") != std::string::npos || body.find("token limit") != std::string::npos;
}

}  // namespace

nlohmann::json make_score_request(const std::string& model, const std::string& prompt,
                                  const std::string& continuation) {
  return {{"model", model}, {"prompt", prompt}, {"continuation", continuation}};
}

TokenScores parse_score_response(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("logprobs") || !body["logprobs"].is_array()) {
    throw CapabilityError("scoring endpoint did not return per-token logprobs");
  }
  TokenScores out;
  for (const auto& lp : body["logprobs"]) {
    if (!lp.is_number()) throw CapabilityError("scoring endpoint returned a non-numeric logprob");
    out.logprobs.push_back(lp.get<double>());
  }
  if (body.contains("tokens")) {
    if (!body["tokens"].is_array()) throw CapabilityError("scoring endpoint returned malformed tokens");
    for (const auto& t : body["tokens"]) out.tokens.push_back(t.is_string() ? t.get<std::string>() : t.dump());
    if (out.tokens.size() != out.logprobs.size()) {
      throw CapabilityError("scoring endpoint returned " + std::to_string(out.tokens.size()) + " tokens but " +
                            std::to_string(out.logprobs.size()) + " logprobs");
    }
  }
  return out;
}

nlohmann::json make_generate_request(const std::string& model, const std::string& prompt, int max_tokens) {
  return {{"model", model}, {"prompt", prompt}, {"max_tokens", max_tokens}, {"temperature", 0}};
}

std::string parse_generate_response(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
    throw CapabilityError("generation endpoint response lacks a 'text' field");
  }
  return body["text"].get<std::string>();
}

HttpScoringClient::HttpScoringClient(HttpClientOptions options) : options_(std::move(options)) {
  const auto scheme_end = options_.base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint URL '" + options_.base_url + "' has no scheme");
  }
  const auto path_start = options_.base_url.find('/', scheme_end + 3);
  scheme_host_port_ = options_.base_url.substr(0, path_start);
  if (path_start != std::string::npos) path_prefix_ = options_.base_url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
#ifndef RAGATTR_HTTPS
  if (options_.base_url.rfind("https://", 0) == 0) {
    throw ConfigError("this build has no TLS support; use an http:// endpoint");
  }
#endif
}

nlohmann::json HttpScoringClient::post(const std::string& route, const nlohmann::json& body) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  auto res = client.Post(path_prefix_ + route, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + scheme_host_port_ + path_prefix_ + route +
                         " failed: " + httplib::to_string(res.error()));
  }
  const int status = res->status;
  if (status == 429 || status >= 500) {
    throw TransportError("endpoint answered HTTP " + std::to_string(status));
  }
  if (status == 413 || (status >= 400 && mentions_length_limit(res->body))) {
    throw InputTooLongError("endpoint rejected the input as too long (HTTP " + std::to_string(status) + ")");
  }
  if (status == 401 || status == 403) {
    throw ConfigError("endpoint rejected the credential (HTTP " + std::to_string(status) + ")");
  }
  if (status >= 400) {
    throw CapabilityError("endpoint answered HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    throw CapabilityError("endpoint returned a non-JSON body");
  }
}

TokenScores HttpScoringClient::score(const std::string& model, const std::string& prompt,
                                     const std::string& continuation) {
  return parse_score_response(post("/score", make_score_request(model, prompt, continuation)));
}

std::string HttpScoringClient::generate(const std::string& model, const std::string& prompt, int max_tokens) {
  return parse_generate_response(post("/generate", make_generate_request(model, prompt, max_tokens)));
}

}  // namespace ragattr
