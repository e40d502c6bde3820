#include "ragattr/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "ragattr/errors.hpp"

namespace ragattr {

namespace {

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void row(std::string& out, const std::string& case_id, ScenarioKind scenario, Method method, std::size_t budget,
         std::uint64_t seed, std::string_view metric, int k, std::optional<double> value) {
  out += csv_field(case_id);
  out += ',';
  out += to_string(scenario);
  out += ',';
  out += to_string(method);
  out += ',' + std::to_string(budget) + ',' + std::to_string(seed) + ',';
  out += metric;
  out += ',';
  if (k > 0) out += std::to_string(k);
  out += ',';
  out += value ? format_double(*value) : "nan";
  out += '\n';
}

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  try {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
      out << content;
      out.flush();
      if (!out) throw ConfigError("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
  } catch (const std::filesystem::filesystem_error& e) {
    throw ConfigError("cannot write '" + path.string() + "': " + e.code().message());
  }
}

std::string experiment_csv(const ExperimentResult& result) {
  std::string out = "case_id,scenario,method,budget,seed,metric,k,value\n";
  for (const auto& r : result.runs) {
    if (result.which == 1) {
      row(out, r.case_id, r.scenario, r.method, r.budget, r.seed, "spearman", 0, r.spearman);
      row(out, r.case_id, r.scenario, r.method, r.budget, r.seed, "pearson", 0, r.pearson);
      row(out, r.case_id, r.scenario, r.method, r.budget, r.seed, "kendall_tau", 0, r.kendall_tau);
      for (const auto& [k, v] : r.precision_shapley) {
        row(out, r.case_id, r.scenario, r.method, r.budget, r.seed, "precision_shapley", k, v);
      }
    } else {
      for (const auto& [k, v] : r.precision_impact) {
        row(out, r.case_id, r.scenario, r.method, r.budget, r.seed, "precision_impact", k, v);
      }
    }
  }
  for (const auto& p : result.pairs) {
    const std::string order = "_" + p.order;
    row(out, p.case_id, p.scenario, p.method, p.budget, p.seed, "norm_a" + order, 0, p.norm_a);
    row(out, p.case_id, p.scenario, p.method, p.budget, p.seed, "norm_b" + order, 0, p.norm_b);
  }
  return out;
}

nlohmann::ordered_json experiment_summary_json(const ExperimentResult& result) {
  nlohmann::ordered_json j;
  j["experiment"] = result.which;
  j["cases"] = result.case_count;
  j["failed_cases"] = result.failed.size();
  j["skipped_cases"] = result.skipped.size();
  auto issues = [](const std::vector<CaseIssue>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& i : v) a.push_back({{"case_id", i.case_id}, {"reason", i.reason}});
    return a;
  };
  j["failed"] = issues(result.failed);
  j["skipped"] = issues(result.skipped);

  if (result.which == 3) {
    nlohmann::ordered_json means = nlohmann::ordered_json::array();
    for (const auto& s : result.summarize_pairs()) {
      means.push_back({{"method", to_string(s.method)},
                       {"budget", s.budget},
                       {"order", s.order},
                       {"mean_a", s.count ? number_or_null(s.mean_a) : nullptr},
                       {"mean_b", s.count ? number_or_null(s.mean_b) : nullptr},
                       {"cases", s.count},
                       {"degenerate", s.degenerate}});
    }
    j["means"] = means;
    return j;
  }
  nlohmann::ordered_json means = nlohmann::ordered_json::array();
  for (const auto& s : result.summarize()) {
    nlohmann::ordered_json m{{"method", to_string(s.method)}, {"budget", s.budget}, {"metric", s.metric}};
    if (s.k > 0) m["k"] = s.k;
    m["mean"] = number_or_null(s.mean);
    m["stderr"] = number_or_null(s.std_error);
    m["count"] = s.count;
    means.push_back(m);
  }
  j["means"] = means;
  return j;
}

}  // namespace ragattr
