#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "ragattr/cache.hpp"
#include "ragattr/datasets.hpp"
#include "ragattr/errors.hpp"
#include "ragattr/estimators.hpp"
#include "ragattr/experiments.hpp"
#include "ragattr/oracle.hpp"
#include "ragattr/report.hpp"
#include "ragattr/scoring_client.hpp"

namespace ragattr::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct OracleOptions {
  std::string oracle = "synthetic";
  std::string endpoint;
  std::string model;
  std::string credential_env;
  std::string template_id = "default";
  std::string cache;
  int parallelism = 1;
  int max_retries = 4;
  int timeout_s = 120;
};

void add_oracle_options(CLI::App* app, OracleOptions& o) {
  app->add_option("--oracle", o.oracle, "Utility oracle")
      ->check(CLI::IsMember({"remote_llm", "synthetic"}))
      ->capture_default_str();
  app->add_option("--endpoint", o.endpoint, "Scoring endpoint base URL (remote_llm)");
  app->add_option("--model", o.model, "Model id; defaults to 'synthetic' for the synthetic oracle");
  app->add_option("--credential-env", o.credential_env, "Name of the environment variable holding the API key");
  app->add_option("--template", o.template_id, "Prompt template id")->capture_default_str();
  app->add_option("--cache", o.cache, "Utility cache file (JSONL); in-memory when omitted");
  app->add_option("--parallelism", o.parallelism, "Concurrent oracle calls")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--max-retries", o.max_retries, "Retries on transport errors")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app->add_option("--timeout", o.timeout_s, "Per-request timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

// Oracle chain: base oracle (synthetic or remote) behind a cache.
class OracleStack {
 public:
  explicit OracleStack(const OracleOptions& o) {
    config_.kind = parse_oracle_kind(o.oracle);
    config_.model_id = !o.model.empty() ? o.model : (config_.kind == OracleKind::kSynthetic ? "synthetic" : "");
    if (config_.model_id.empty()) throw ConfigError("--model is required for the remote_llm oracle");
    config_.endpoint_url = o.endpoint;
    config_.prompt_template_id = o.template_id;
    config_.max_parallel = o.parallelism;
    config_.cache_path = o.cache;
    config_.credential_env = o.credential_env;
    config_.max_retries = o.max_retries;
    config_.validate();

    if (config_.kind == OracleKind::kSynthetic) {
      synthetic_ = std::make_unique<SyntheticOracle>(config_.model_id);
    } else {
      client_ = std::make_unique<HttpScoringClient>(
          HttpClientOptions{o.endpoint, config_.credential(), std::chrono::seconds(o.timeout_s)});
      remote_ = std::make_unique<RemoteOracle>(config_, *client_);
    }
    cache_ = o.cache.empty() ? std::make_unique<UtilityCache>() : std::make_unique<UtilityCache>(o.cache);
    UtilityOracle& base = synthetic_ ? static_cast<UtilityOracle&>(*synthetic_) : *remote_;
    cached_ = std::make_unique<CachedOracle>(base, *cache_);
  }

  const OracleConfig& config() const { return config_; }
  UtilityOracle& oracle() { return *cached_; }
  std::size_t fresh_evaluations() const { return cached_->misses(); }
  const std::vector<std::string>& cache_warnings() const { return cache_->load_warnings(); }

  // Synthetic: registers each case's game, from extra["game"] or else from
  // its scenario tag. Remote: fills missing target responses. Returns the
  // number of responses generated.
  std::size_t prepare(std::vector<QueryCase>& cases) {
    std::size_t generated = 0;
    for (auto& c : cases) {
      if (synthetic_) {
        if (c.extra.contains("game")) {
          GameSpec g = GameSpec::from_json(c.extra["game"]);
          if (g.n != c.n()) {
            throw ConfigError("case '" + c.case_id + "': game has " + std::to_string(g.n) + " players for " +
                              std::to_string(c.n()) + " documents");
          }
          synthetic_->set_game(c.case_id, std::move(g));
        } else if (c.scenario != ScenarioKind::kNone && c.positive_pair) {
          synthetic_->set_game(c.case_id, attach_synthetic_game(c, std::vector<double>(c.documents.size(), 0.0)));
        } else {
          throw ConfigError("case '" + c.case_id + "' has neither a \"game\" field nor a scenario tag with a pair");
        }
      } else if (!c.target_response) {
        generate_target_response(c, config_, client_.get());
        ++generated;
      }
    }
    return generated;
  }

 private:
  OracleConfig config_;
  std::unique_ptr<SyntheticOracle> synthetic_;
  std::unique_ptr<HttpScoringClient> client_;
  std::unique_ptr<RemoteOracle> remote_;
  std::unique_ptr<UtilityCache> cache_;
  std::unique_ptr<CachedOracle> cached_;
};

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> methods;
  for (const auto& name : names) {
    const Method m = parse_method(name);
    if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
  }
  if (methods.empty()) throw ConfigError("at least one method is required");
  return methods;
}

void report_warnings(const std::vector<std::string>& warnings, const std::string& what, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << what << ": " << w << "\n";
}

std::string score_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --- attribute -------------------------------------------------------------

struct AttributeOptions {
  OracleOptions oracle;
  std::string cases;
  std::vector<std::string> case_ids;
  std::vector<std::string> methods{"shapley"};
  std::vector<std::size_t> budgets{100};
  std::uint64_t seed = 0;
  std::optional<double> lambda;
  std::string out = "attribution.json";
};

int cmd_attribute(const AttributeOptions& o, std::ostream& out, std::ostream& err) {
  std::vector<QueryCase> cases = load_cases(o.cases);
  if (!o.case_ids.empty()) {
    const std::set<std::string> wanted(o.case_ids.begin(), o.case_ids.end());
    std::erase_if(cases, [&](const QueryCase& c) { return !wanted.contains(c.case_id); });
    for (const auto& id : wanted) {
      if (std::none_of(cases.begin(), cases.end(), [&](const QueryCase& c) { return c.case_id == id; })) {
        throw ConfigError("case '" + id + "' not found in '" + o.cases + "'");
      }
    }
  }
  const std::vector<Method> methods = parse_methods(o.methods);
  OracleStack stack(o.oracle);
  report_warnings(stack.cache_warnings(), "cache", err);
  stack.prepare(cases);

  EstimatorSettings settings;
  settings.seed = o.seed;
  settings.lasso_lambda = o.lambda;
  settings.parallelism = o.oracle.parallelism;

  nlohmann::ordered_json artifact;
  artifact["model_id"] = stack.config().model_id;
  artifact["oracle"] = std::string(to_string(stack.config().kind));
  artifact["seed"] = o.seed;
  artifact["results"] = nlohmann::ordered_json::array();

  for (const auto& c : cases) {
    for (const Method m : methods) {
      const std::vector<std::size_t> budgets =
          is_budgeted(m) ? o.budgets : std::vector<std::size_t>{0};
      for (const std::size_t budget : budgets) {
        if (budget > 0) settings.budget = budget;
        const AttributionVector v = run_method(m, c, stack.oracle(), settings);
        out << "case " << c.case_id << "  method " << to_string(m) << "  budget " << v.budget << "  seed "
            << v.seed << "  calls " << v.oracle_calls << (v.low_confidence ? "  low_confidence" : "") << "\n";
        int rank = 1;
        for (const int i : rank_order(v.scores)) {
          out << "  " << rank++ << "\t" << c.documents[static_cast<std::size_t>(i)].doc_id << "\t"
              << score_text(v.scores[static_cast<std::size_t>(i)]) << "\n";
        }
        nlohmann::ordered_json entry = nlohmann::ordered_json::parse(v.to_json().dump());
        entry["doc_ids"] = nlohmann::ordered_json::array();
        for (const auto& d : c.documents) entry["doc_ids"].push_back(d.doc_id);
        artifact["results"].push_back(std::move(entry));
      }
    }
  }
  write_atomic(o.out, artifact.dump(2) + "\n");
  out << "fresh evaluations: " << stack.fresh_evaluations() << "\n";
  out << "wrote " << o.out << "\n";
  return kExitOk;
}

// --- experiment ------------------------------------------------------------

struct ExperimentOptions {
  OracleOptions oracle;
  int which = 1;
  std::string cases;
  std::vector<std::string> methods{"shapley", "loo", "tmc", "beta", "kernel_shap", "context_cite"};
  std::vector<std::size_t> budgets{32, 64, 100};
  std::vector<std::uint64_t> seeds{0};
  std::vector<int> ks{2, 3, 4, 5};
  std::optional<double> lambda;
  std::string out = "results";
};

int cmd_experiment(const ExperimentOptions& o, std::ostream& out, std::ostream& err) {
  std::vector<QueryCase> cases = load_cases(o.cases);
  ExperimentConfig config;
  config.methods = parse_methods(o.methods);
  config.budgets = o.budgets;
  config.seeds = o.seeds;
  config.ks = o.ks;
  config.settings.lasso_lambda = o.lambda;
  config.parallelism = o.oracle.parallelism;
  if (config.seeds.empty()) throw ConfigError("at least one seed is required");
  if (config.budgets.empty()) throw ConfigError("at least one budget is required");

  OracleStack stack(o.oracle);
  report_warnings(stack.cache_warnings(), "cache", err);
  const std::size_t generated = stack.prepare(cases);

  std::filesystem::path dir(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  if (generated > 0) save_cases(dir / "cases.resolved.jsonl", cases);

  ExperimentResult result;
  switch (o.which) {
    case 1: result = experiment1(cases, stack.oracle(), config); break;
    case 2: result = experiment2(cases, stack.oracle(), config); break;
    case 3: result = experiment3(cases, stack.oracle(), config); break;
    default: throw ConfigError("--which must be 1, 2 or 3");
  }

  const std::string stem = "experiment" + std::to_string(o.which);
  write_atomic(dir / (stem + ".csv"), experiment_csv(result));
  nlohmann::ordered_json summary = experiment_summary_json(result);
  summary["model_id"] = stack.config().model_id;
  summary["oracle"] = std::string(to_string(stack.config().kind));
  write_atomic(dir / (stem + "_summary.json"), summary.dump(2) + "\n");

  for (const auto& s : result.skipped) err << "warning: skipped " << s.case_id << ": " << s.reason << "\n";
  for (const auto& f : result.failed) err << "error: case " << f.case_id << " failed: " << f.reason << "\n";
  out << stem << ": " << result.case_count << " cases, " << result.skipped.size() << " skipped, "
      << result.failed.size() << " failed\n";
  out << "fresh evaluations: " << stack.fresh_evaluations() << "\n";
  out << "wrote " << (dir / (stem + ".csv")).string() << " and " << (dir / (stem + "_summary.json")).string()
      << "\n";
  if (!result.skipped.empty()) out << "warnings: " << result.skipped.size() << "\n";
  return result.failed.empty() ? kExitOk : kExitRuntime;
}

// --- gen-synthetic -----------------------------------------------------------

struct GenOptions {
  std::string kind;
  int count = 20;
  std::uint64_t seed = 0;
  int n_docs = 10;
  std::pair<int, int> positions{0, 1};
  std::string out;
};

int cmd_gen_synthetic(const GenOptions& o, std::ostream& out) {
  const auto tmpl = ScenarioTemplate::with_default_lexicon(parse_scenario_kind(o.kind), o.seed);
  const auto cases = generate_scenario_cases(tmpl, o.count, o.n_docs, o.positions);
  save_cases(o.out, cases);
  out << "wrote " << cases.size() << " cases to " << o.out << "\n";
  return kExitOk;
}

// --- cache -------------------------------------------------------------------

struct CacheOptions {
  std::string action;
  std::string path;
  std::string cases;
};

int cmd_cache(const CacheOptions& o, std::ostream& out, std::ostream& err) {
  if (!std::filesystem::exists(o.path)) throw ConfigError("cache file '" + o.path + "' does not exist");
  const CacheScan scan = scan_cache_file(o.path);
  report_warnings(scan.warnings, o.path, err);

  std::map<std::string, int> known_n;
  if (!o.cases.empty()) {
    for (const auto& c : load_cases(o.cases)) known_n[c.case_id] = c.n();
  }

  struct Coverage {
    std::set<std::uint32_t> masks;
    std::uint32_t highest = 0;
    std::int64_t tokens = 0;
  };
  std::map<std::pair<std::string, std::string>, Coverage> per_case;
  std::int64_t tokens = 0;
  for (const auto& r : scan.records) {
    auto& cov = per_case[{r.key.case_id, r.key.model_id}];
    cov.masks.insert(r.key.coalition_bits);
    cov.highest |= r.key.coalition_bits;
    cov.tokens += r.entry.token_count;
    tokens += r.entry.token_count;
  }

  out << "records: " << scan.records.size() << "\n";
  out << "warnings: " << scan.warnings.size() << "\n";
  out << "cases: " << per_case.size() << "\n";
  out << "tokens: " << tokens << "\n";
  if (o.action == "inspect") {
    for (const auto& [key, cov] : per_case) {
      int n = 0;
      if (auto it = known_n.find(key.first); it != known_n.end()) {
        n = it->second;
      } else {
        while (n < 32 && (cov.highest >> n) != 0) ++n;
      }
      out << key.first << "\t" << key.second << "\t" << cov.masks.size() << "/" << (std::uint64_t{1} << n)
          << "\ttokens " << cov.tokens << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Document attribution for retrieval-augmented generation"};
  app.name("ragattr");
  app.set_config("--config", "", "TOML configuration file; command-line flags take precedence");
  app.require_subcommand(1);

  AttributeOptions attr;
  auto* attribute = app.add_subcommand("attribute", "Score each document of each case");
  attribute->add_option("cases", attr.cases, "Case file (JSONL)")->required();
  attribute->add_option("--case", attr.case_ids, "Only these case ids")->delimiter(',');
  attribute->add_option("--methods", attr.methods, "Comma-separated methods")->delimiter(',')->capture_default_str();
  attribute->add_option("--budgets", attr.budgets, "Oracle budgets for sampled methods")
      ->delimiter(',')
      ->capture_default_str();
  attribute->add_option("--seed", attr.seed, "Estimator seed")->capture_default_str();
  attribute->add_option("--lambda", attr.lambda, "Fixed lasso penalty for context_cite (default: cross-validated)");
  attribute->add_option("--out", attr.out, "JSON artifact path")->capture_default_str();
  add_oracle_options(attribute, attr.oracle);

  ExperimentOptions exp;
  auto* experiment = app.add_subcommand("experiment", "Run an evaluation protocol over a case file");
  experiment->add_option("--which", exp.which, "Protocol: 1 correlation, 2 impact precision, 3 pair bias")
      ->check(CLI::IsMember({1, 2, 3}))
      ->capture_default_str();
  experiment->add_option("cases", exp.cases, "Case file (JSONL)")->required();
  experiment->add_option("--methods", exp.methods, "Comma-separated methods")->delimiter(',')->capture_default_str();
  experiment->add_option("--budgets", exp.budgets, "Oracle budgets")->delimiter(',')->capture_default_str();
  experiment->add_option("--seeds", exp.seeds, "Estimator seeds")->delimiter(',')->capture_default_str();
  experiment->add_option("--k", exp.ks, "Impact-set sizes (experiment 2)")->delimiter(',')->capture_default_str();
  experiment->add_option("--lambda", exp.lambda, "Fixed lasso penalty for context_cite");
  experiment->add_option("--out", exp.out, "Output directory")->capture_default_str();
  add_oracle_options(experiment, exp.oracle);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Generate AB/BA scenario cases");
  gen_cmd->add_option("--kind", gen.kind, "Scenario kind")
      ->required()
      ->check(CLI::IsMember({"redundancy", "complementarity", "synergy"}));
  gen_cmd->add_option("--count", gen.count, "Scenarios (each yields an AB and a BA case)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--n-docs", gen.n_docs, "Documents per case")->capture_default_str();
  gen_cmd->add_option("--positions", gen.positions, "Slots of the positive pair in the AB variant")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output case file")->required();

  CacheOptions cache;
  auto* cache_cmd = app.add_subcommand("cache", "Summarize a utility cache file");
  cache_cmd->add_option("action", cache.action, "inspect or stats")
      ->required()
      ->check(CLI::IsMember({"inspect", "stats"}));
  cache_cmd->add_option("path", cache.path, "Cache file")->required();
  cache_cmd->add_option("--cases", cache.cases, "Case file giving document counts for coverage");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front()) {
      err << "run '" << sub->get_name() << " --help' for usage\n";
    }
    return kExitUsage;
  }

  try {
    if (attribute->parsed()) return cmd_attribute(attr, out, err);
    if (experiment->parsed()) return cmd_experiment(exp, out, err);
    if (gen_cmd->parsed()) return cmd_gen_synthetic(gen, out);
    if (cache_cmd->parsed()) return cmd_cache(cache, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace ragattr::cli
