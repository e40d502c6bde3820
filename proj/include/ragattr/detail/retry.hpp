#pragma once

#include <algorithm>
#include <thread>

#include "ragattr/errors.hpp"

namespace ragattr {

template <typename Fn>
auto with_retries(const OracleConfig& config, Fn&& fn) -> decltype(fn()) {
  auto backoff = config.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    try {
      return fn();
    } catch (const TransportError&) {
      if (attempt >= config.max_retries) throw;
    }
    std::this_thread::sleep_for(backoff);
    backoff = std::min(backoff * 2, config.max_backoff);
  }
}

}  // namespace ragattr
