#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace ragattr {

struct CacheKey {
  std::string case_id;
  std::string model_id;
  std::uint32_t coalition_bits = 0;

  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

struct CacheEntry {
  double value = 0.0;
  std::int64_t token_count = 0;
};

struct CacheLine {
  CacheKey key;
  CacheEntry entry;
};

struct CacheScan {
  std::vector<CacheLine> records;     // in file order
  std::vector<std::string> warnings;  // one per rejected line, "line N: reason"
};

// Reads a JSONL cache file. Corrupt lines are reported and skipped; a missing
// file yields an empty scan.
CacheScan scan_cache_file(const std::filesystem::path& path);

std::string format_cache_line(const CacheLine& line);

// Memoized utilities keyed by (case_id, model_id, coalition). When backed by
// a file, existing records are loaded on construction and every new record is
// appended as one JSON line and flushed.
//
// get_or_compute evaluates each key at most once: concurrent callers for a key
// that is in flight block until the first caller finishes. A computation that
// throws is not cached, and the exception is rethrown to every waiter.
class UtilityCache {
 public:
  UtilityCache() = default;
  explicit UtilityCache(const std::filesystem::path& path);

  UtilityCache(const UtilityCache&) = delete;
  UtilityCache& operator=(const UtilityCache&) = delete;

  std::optional<CacheEntry> lookup(const CacheKey& key) const;
  CacheEntry get_or_compute(const CacheKey& key, const std::function<CacheEntry()>& compute);

  std::size_t size() const;
  const std::vector<std::string>& load_warnings() const { return load_warnings_; }

 private:
  mutable std::mutex mu_;
  std::map<CacheKey, std::shared_future<CacheEntry>> entries_;
  std::optional<std::ofstream> out_;
  std::vector<std::string> load_warnings_;
};

}  // namespace ragattr
