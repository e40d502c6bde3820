#pragma once

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "ragattr/coalition.hpp"
#include "ragattr/game.hpp"
#include "ragattr/oracle.hpp"
#include "ragattr/types.hpp"

namespace ragattr::testing {

inline QueryCase make_case(const std::string& id, int n) {
  QueryCase c;
  c.case_id = id;
  c.query = "query " + id;
  for (int i = 0; i < n; ++i) c.documents.push_back({"d" + std::to_string(i), "document " + std::to_string(i)});
  return c;
}

// Random game of the given kind. Player `dummy` (when >= 0) gets weight 0
// and stays out of the pair, so it is a dummy player.
inline GameSpec random_game(std::mt19937_64& g, GameKind kind, int n, int dummy = -1, double noise = 0.0) {
  std::uniform_real_distribution<double> w(-1.0, 2.0);
  GameSpec spec;
  spec.kind = kind;
  spec.n = n;
  spec.weights.resize(static_cast<std::size_t>(n));
  for (auto& x : spec.weights) x = w(g);
  if (kind != GameKind::kAdditive) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::erase(idx, dummy);
    std::shuffle(idx.begin(), idx.end(), g);
    spec.pair = {idx[0], idx[1]};
    spec.weights[static_cast<std::size_t>(idx[0])] = 0.0;
    spec.weights[static_cast<std::size_t>(idx[1])] = 0.0;
    spec.pair_value = std::uniform_real_distribution<double>(0.5, 3.0)(g);
  }
  if (dummy >= 0) spec.weights[static_cast<std::size_t>(dummy)] = 0.0;
  spec.noise_sigma = noise;
  spec.noise_seed = g();
  spec.validate();
  return spec;
}

inline std::vector<double> game_table(const GameSpec& spec) {
  std::vector<double> v(std::size_t{1} << spec.n);
  for (std::uint32_t b = 0; b < v.size(); ++b) v[b] = synthetic_utility(spec, CoalitionMask(spec.n, b));
  return v;
}

// Shapley value as the average marginal contribution over all n! orderings.
inline std::vector<double> permutation_shapley(const std::vector<double>& table, int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  double perms = 0;
  do {
    std::uint32_t bits = 0;
    for (int p : order) {
      const std::uint32_t next = bits | (1u << p);
      phi[static_cast<std::size_t>(p)] += table[next] - table[bits];
      bits = next;
    }
    perms += 1;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& x : phi) x /= perms;
  return phi;
}

// Local logprob endpoint. Each document's text contributes a fixed amount
// to the total log-likelihood, so v(S) is additive in the documents shown.
class MockScoringServer {
 public:
  MockScoringServer() {
    server_.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
      ++score_requests_;
      auto body = nlohmann::json::parse(req.body);
      const std::string prompt = body.at("prompt");
      double total = -6.0;
      for (const auto& [needle, gain] : gains_) {
        if (prompt.find(needle) != std::string::npos) total += gain;
      }
      nlohmann::json out{{"tokens", {"a", "b", "c"}}, {"logprobs", {total / 2, total / 4, total / 4}}};
      res.set_content(out.dump(), "application/json");
    });
    server_.Post("/generate", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"text":"an answer"})", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockScoringServer() {
    server_.stop();
    thread_.join();
  }
  void set_gain(const std::string& needle, double gain) { gains_.emplace_back(needle, gain); }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int score_requests() const { return score_requests_.load(); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::vector<std::pair<std::string, double>> gains_;
  std::atomic<int> score_requests_{0};
};

}  // namespace ragattr::testing
