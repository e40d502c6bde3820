#include "ragattr/cache.hpp"

#include <charconv>

#include <json.hpp>

#include "ragattr/errors.hpp"

namespace ragattr {

namespace {

CacheLine parse_cache_line(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CacheLine line;
  line.key.case_id = j.at("case_id").get<std::string>();
  line.key.model_id = j.at("model_id").get<std::string>();
  const auto bits = j.at("coalition_bits").get<std::string>();
  std::uint64_t parsed = 0;
  const auto [ptr, ec] = std::from_chars(bits.data(), bits.data() + bits.size(), parsed);
  if (ec != std::errc{} || ptr != bits.data() + bits.size() || bits.empty() || parsed > 0xffffffffULL) {
    throw std::invalid_argument("coalition_bits is not a decimal mask: '" + bits + "'");
  }
  line.key.coalition_bits = static_cast<std::uint32_t>(parsed);
  line.entry.value = j.at("value").get<double>();
  line.entry.token_count = j.at("token_count").get<std::int64_t>();
  return line;
}

}  // namespace

std::string format_cache_line(const CacheLine& line) {
  nlohmann::ordered_json j;
  j["case_id"] = line.key.case_id;
  j["model_id"] = line.key.model_id;
  j["coalition_bits"] = std::to_string(line.key.coalition_bits);
  j["value"] = line.entry.value;
  j["token_count"] = line.entry.token_count;
  return j.dump();
}

CacheScan scan_cache_file(const std::filesystem::path& path) {
  CacheScan scan;
  std::ifstream in(path);
  if (!in) return scan;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      scan.records.push_back(parse_cache_line(text));
    } catch (const std::exception& e) {
      scan.warnings.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return scan;
}

UtilityCache::UtilityCache(const std::filesystem::path& path) {
  CacheScan scan = scan_cache_file(path);
  load_warnings_ = std::move(scan.warnings);
  for (const auto& line : scan.records) {
    std::promise<CacheEntry> p;
    p.set_value(line.entry);
    entries_.emplace(line.key, p.get_future().share());
  }
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  // An interrupted writer can leave a torn last line; start on a fresh one.
  bool torn = false;
  if (std::ifstream in(path, std::ios::binary); in && in.seekg(0, std::ios::end) && in.tellg() > 0) {
    in.seekg(-1, std::ios::end);
    torn = in.get() != '\n';
  }
  out_.emplace(path, std::ios::app);
  if (!*out_) throw ConfigError("cannot open cache file '" + path.string() + "' for appending");
  if (torn) *out_ << '\n' << std::flush;
}

std::optional<CacheEntry> UtilityCache::lookup(const CacheKey& key) const {
  std::shared_future<CacheEntry> f;
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    f = it->second;
  }
  try {
    return f.get();
  } catch (...) {
    return std::nullopt;
  }
}

CacheEntry UtilityCache::get_or_compute(const CacheKey& key, const std::function<CacheEntry()>& compute) {
  std::promise<CacheEntry> promise;
  std::unique_lock lock(mu_);
  if (auto it = entries_.find(key); it != entries_.end()) {
    auto pending = it->second;
    lock.unlock();
    return pending.get();
  }
  entries_.emplace(key, promise.get_future().share());
  lock.unlock();

  CacheEntry entry;
  try {
    entry = compute();
  } catch (...) {
    lock.lock();
    entries_.erase(key);
    lock.unlock();
    promise.set_exception(std::current_exception());
    throw;
  }
  lock.lock();
  if (out_) {
    *out_ << format_cache_line({key, entry}) << '\n';
    out_->flush();
  }
  lock.unlock();
  promise.set_value(entry);
  return entry;
}

std::size_t UtilityCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

}  // namespace ragattr
