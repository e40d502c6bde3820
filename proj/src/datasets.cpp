#include "ragattr/datasets.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ragattr/errors.hpp"
#include "ragattr/random.hpp"
#include "ragattr/report.hpp"

namespace ragattr {

namespace {

const std::set<std::string> kCaseFields = {"id", "query", "documents", "target_response", "scenario", "positive_pair"};
const std::set<std::string> kDocFields = {"id", "text", "label"};

const nlohmann::json& field(const nlohmann::json& j, const char* name, std::size_t line) {
  if (!j.contains(name)) throw ParseError(std::string("missing field '") + name + "'", line);
  return j[name];
}

std::string string_field(const nlohmann::json& j, const char* name, std::size_t line) {
  const auto& v = field(j, name, line);
  if (!v.is_string()) throw ParseError(std::string("field '") + name + "' must be a string", line);
  return v.get<std::string>();
}

// --- scenario text -------------------------------------------------------

struct Fill {
  rng::Engine& g;
  template <std::size_t N>
  const char* pick(const char* const (&options)[N]) {
    return options[rng::uniform_below(g, N)];
  }
  int number(int lo, int hi) { return lo + static_cast<int>(rng::uniform_below(g, static_cast<std::uint64_t>(hi - lo + 1))); }
};

constexpr const char* kWeather[] = {"sunny", "foggy", "stormy", "snowy", "drizzly", "windy", "humid", "overcast"};
constexpr const char* kGoods[] = {"glass beads", "copper kettles", "salted moss", "woven reeds", "blue amber",
                                  "spiced cheese"};
constexpr const char* kAnimals[] = {"striped heron", "horned otter", "silver fox", "dune tortoise", "moss deer"};
constexpr const char* kLanguages[] = {"Vellish", "Old Marrow", "Tunric", "Soddish", "High Quor"};
constexpr const char* kGreetings[] = {"touching elbows", "a double bow", "tapping shoulders twice",
                                      "raising both palms", "a slow wink"};
constexpr const char* kRoles[] = {"Star-Navigator", "Rift-Warden", "Archivist", "Tide-Keeper", "Lens-Smith",
                                  "Signal Marshal", "Bridge Engineer", "Seed Curator"};
constexpr const char* kHobbies[] = {"kite racing", "glass painting", "river chess", "moss gardening",
                                    "lantern carving"};

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

struct Scenario {
  std::string query;
  std::string positive_a;
  std::string positive_b;
  std::string answer;
  std::vector<std::string> negatives;
};

std::vector<std::string> place_negatives(const std::string& place, Fill& f) {
  return {
      place + " is a mountainous country crossed by three rivers.",
      "All vehicles in " + place + " hover at least ten centimeters above the ground.",
      "Water in " + place + " freezes at fifty degrees because of its added minerals.",
      place + " is divided into " + std::to_string(f.number(3, 19)) + " provinces.",
      std::string("The national animal of ") + place + " is the " + f.pick(kAnimals) + ".",
      place + " exports mostly " + f.pick(kGoods) + ".",
      std::string("Most people in ") + place + " speak " + f.pick(kLanguages) + ".",
      place + " was founded " + std::to_string(f.number(120, 900)) + " years ago.",
      "The tallest tower in " + place + " is " + std::to_string(f.number(80, 400)) + " meters high.",
      "Festivals in " + place + " last for " + std::to_string(f.number(2, 12)) + " days.",
  };
}

Scenario redundancy_scenario(const std::string& place, Fill& f) {
  Scenario s;
  if (f.number(0, 1) == 0) {
    s.answer = f.pick(kWeather);
    s.query = "What is the weather in " + place + "?";
    s.positive_a = "The weather in " + place + " is " + s.answer + ".";
    s.positive_b = "Today the sky over " + place + " is " + s.answer + ", as it usually is this season.";
  } else {
    s.answer = f.pick(kGreetings);
    s.query = "What is the traditional greeting in " + place + "?";
    s.positive_a = "The traditional greeting in " + place + " is " + s.answer + ".";
    s.positive_b = "Etiquette in " + place + " requires greeting every stranger by " + s.answer + ".";
  }
  s.negatives = place_negatives(place, f);
  return s;
}

Scenario complementarity_scenario(const std::string& first, const std::string& second, const std::string& ship,
                                  Fill& f) {
  Scenario s;
  const std::string role_a = f.pick(kRoles);
  std::string role_b = f.pick(kRoles);
  while (role_b == role_a) role_b = f.pick(kRoles);
  s.answer = role_a + "; " + role_b;
  s.query = "What are the roles or professions of " + first + " and " + second + "?";
  s.positive_a = first + " is the chief " + role_a + " of the starship '" + ship + "'.";
  s.positive_b = second + " serves as the primary " + role_b + " aboard the starship '" + ship + "'.";
  s.negatives = {
      "Many young cadets dream of joining the crew of the '" + ship + "'.",
      first + " enjoys " + f.pick(kHobbies) + " during shore leave.",
      second + " has " + std::to_string(f.number(1, 6)) + " siblings on the home colony.",
      "The starship '" + ship + "' was launched " + std::to_string(f.number(3, 40)) + " years ago.",
      "The '" + ship + "' carries a crew of " + std::to_string(f.number(40, 600)) + ".",
      first + " and " + second + " first met at a trade fair.",
      "Every officer aboard the '" + ship + "' wears a green sash on feast days.",
      second + " keeps a collection of " + f.pick(kGoods) + ".",
      "The mess hall of the '" + ship + "' serves " + f.pick(kGoods) + " every evening.",
      first + " once won a prize for " + f.pick(kHobbies) + ".",
  };
  return s;
}

Scenario synergy_scenario(const std::string& place, const std::string& capital, const std::vector<std::string>& towns,
                          Fill& f) {
  Scenario s;
  s.answer = f.pick(kWeather);
  s.query = "What is the weather in the capital of " + place + "?";
  s.positive_a = "The capital of " + place + " is " + capital + ".";
  s.positive_b = "The weather in " + capital + " is " + s.answer + ".";
  for (const auto& town : towns) {
    std::string other = f.pick(kWeather);
    while (other == s.answer) other = f.pick(kWeather);
    s.negatives.push_back("The weather in " + town + " is " + other + ".");
  }
  for (auto& neg : place_negatives(place, f)) s.negatives.push_back(std::move(neg));
  return s;
}

}  // namespace

QueryCase case_from_json(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError("case must be a JSON object", line);
  QueryCase c;
  c.case_id = string_field(j, "id", line);
  c.query = string_field(j, "query", line);
  const auto& docs = field(j, "documents", line);
  if (!docs.is_array()) throw ParseError("field 'documents' must be an array", line);
  for (const auto& d : docs) {
    if (!d.is_object()) throw ParseError("each document must be an object", line);
    Document doc;
    doc.doc_id = string_field(d, "id", line);
    doc.text = string_field(d, "text", line);
    if (d.contains("label")) {
      try {
        doc.label = parse_doc_label(d["label"].get<std::string>());
      } catch (const std::exception& e) {
        throw ParseError(std::string("field 'label': ") + e.what(), line);
      }
    }
    for (const auto& [k, v] : d.items()) {
      if (!kDocFields.contains(k)) doc.extra[k] = v;
    }
    c.documents.push_back(std::move(doc));
  }
  if (j.contains("target_response") && !j["target_response"].is_null()) {
    c.target_response = string_field(j, "target_response", line);
  }
  if (j.contains("scenario") && !j["scenario"].is_null()) {
    try {
      c.scenario = parse_scenario_kind(string_field(j, "scenario", line));
    } catch (const ConfigError& e) {
      throw ParseError(std::string("field 'scenario': ") + e.what(), line);
    }
  }
  if (j.contains("positive_pair") && !j["positive_pair"].is_null()) {
    const auto& p = j["positive_pair"];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer()) {
      throw ParseError("field 'positive_pair' must be a pair of integers", line);
    }
    c.positive_pair = std::pair{p[0].get<int>(), p[1].get<int>()};
  }
  for (const auto& [k, v] : j.items()) {
    if (!kCaseFields.contains(k)) c.extra[k] = v;
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), line);
  }
  return c;
}

nlohmann::ordered_json case_to_json(const QueryCase& c) {
  nlohmann::ordered_json j;
  j["id"] = c.case_id;
  j["query"] = c.query;
  j["documents"] = nlohmann::ordered_json::array();
  for (const auto& d : c.documents) {
    nlohmann::ordered_json doc{{"id", d.doc_id}, {"text", d.text}, {"label", to_string(d.label)}};
    for (const auto& [k, v] : d.extra.items()) doc[k] = v;
    j["documents"].push_back(std::move(doc));
  }
  if (c.target_response) j["target_response"] = *c.target_response;
  if (c.scenario != ScenarioKind::kNone) j["scenario"] = to_string(c.scenario);
  if (c.positive_pair) j["positive_pair"] = {c.positive_pair->first, c.positive_pair->second};
  for (const auto& [k, v] : c.extra.items()) j[k] = v;
  return j;
}

std::vector<QueryCase> parse_cases(std::istream& in) {
  std::vector<QueryCase> cases;
  std::set<std::string> ids;
  std::string text;
  for (std::size_t line = 1; std::getline(in, text); ++line) {
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line);
    }
    QueryCase c = case_from_json(j, line);
    if (!ids.insert(c.case_id).second) throw ParseError("duplicate case id '" + c.case_id + "'", line);
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<QueryCase> load_cases(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open case file '" + path.string() + "'");
  return parse_cases(in);
}

std::string format_cases(const std::vector<QueryCase>& cases) {
  std::string out;
  for (const auto& c : cases) out += case_to_json(c).dump() + "\n";
  return out;
}

void save_cases(const std::filesystem::path& path, const std::vector<QueryCase>& cases) {
  write_atomic(path, format_cases(cases));
}

ScenarioTemplate ScenarioTemplate::with_default_lexicon(ScenarioKind kind, std::uint64_t seed) {
  ScenarioTemplate t;
  t.kind = kind;
  t.rng_seed = seed;
  t.places = {"Suvsambil", "Blimpton",  "Aethelon", "Quorvania", "Drelmark", "Tessaly",  "Vornheim",
              "Ostrivel",  "Kallimor",  "Zenthara", "Murrowby",  "Pellucid", "Ysgarde",  "Fennoris",
              "Caldrith",  "Hollowmere", "Irvessa", "Jorunfell", "Lutheran Vale", "Marquesse",
              "Nimbara",   "Orrinth",   "Palavent", "Rhosk",     "Sablecrest", "Tarnvel", "Umberlin",
              "Varkesh",   "Wendmoor",  "Xantheum"};
  t.names = {"Elara Vayne",  "Jax Korden",   "Lyra Vael",    "Orin Thale",  "Mira Colt",    "Dax Ferren",
             "Sela Quint",   "Taro Brisk",   "Ivo Marsh",    "Nessa Rook",  "Bram Holloway", "Cyra Lenn",
             "Petra Vosk",   "Quill Arden",  "Rhea Dusk",    "Soren Pike",  "Tamsin Crale", "Ulric Fane",
             "Vera Sorrel",  "Wren Adley",   "Yara Thorne",  "Zane Morrow", "Anya Strell",  "Borin Tusk",
             "Cass Wilder",  "Dorian Fell",  "Esme Rand",    "Fenn Asher",  "Greer Holt",   "Hale Ostrum",
             "Ilse Varga",   "Joss Merrin",  "Kira Vane",    "Lior Benn",   "Maren Cole",   "Nico Sarrow",
             "Odile Frame",  "Pax Emery",    "Rosalind Kaye", "Silas Wren", "Thea Lorne",   "Uma Dray"};
  t.artifacts = {"Savrak",  "Tentak",  "Wanderer", "Brightwake", "Calloway", "Duskmere", "Emberfall",
                 "Farrow",  "Glimmer", "Harth",    "Isenreach",  "Jadeport", "Kestrel",  "Lumen",
                 "Marrick", "Norwick", "Oakhelm",  "Pyrewell",   "Quillon",  "Rothmere", "Stellan",
                 "Thistle", "Umbra",   "Vantor",   "Wyrmgate",   "Yelling",  "Zephyrine", "Ashgrove",
                 "Bellhaven", "Cinderby", "Draymoor", "Eastwold", "Foxmere", "Gildwater", "Hearthstone",
                 "Ivywick", "Juniper Hold", "Knellridge", "Larkspur", "Mistvale", "Northspire", "Oriel",
                 "Pinecrest", "Quarrystone", "Redfern", "Saltmarsh", "Tidewater", "Underhill", "Vesper",
                 "Whitlow", "Yarrowby", "Zinnia", "Amberlee", "Briarwood", "Coldharbour", "Dewmist",
                 "Elmsworth", "Fairhollow", "Grimsby Rock", "Hollin", "Ironmoor", "Jasperton", "Kilnworth",
                 "Lowbridge", "Mossgate", "Nettlefield", "Otterburn", "Pebblecombe", "Quenby", "Rookhaven",
                 "Stonemere", "Thornbury", "Ulverholt", "Valewick", "Wolfden", "Yewdale", "Zelmont",
                 "Arrowfen", "Brackenridge", "Copperhithe", "Dunmarrow", "Eldergate", "Fernhallow",
                 "Glasswick", "Hazelmoor"};
  return t;
}

std::vector<QueryCase> generate_scenario_cases(const ScenarioTemplate& tmpl, int count, int n_docs,
                                               std::pair<int, int> positions) {
  if (tmpl.kind == ScenarioKind::kNone) throw ConfigError("scenario kind must be set");
  if (n_docs < 3 || n_docs > kMaxPlayers) throw ConfigError("n_docs must lie in [3, 30]");
  if (count < 0) throw ConfigError("count must be >= 0");
  const auto [pos_a, pos_b] = positions;
  if (pos_a == pos_b || pos_a < 0 || pos_b < 0 || pos_a >= n_docs || pos_b >= n_docs) {
    throw ConfigError("positive positions must be distinct and < n_docs");
  }

  auto g = rng::make_engine(tmpl.rng_seed, static_cast<std::uint64_t>(tmpl.kind));
  Fill fill{g};
  const auto need = static_cast<std::size_t>(count);
  auto shuffled = [&](std::vector<std::string> v) {
    rng::shuffle(v.begin(), v.end(), g);
    return v;
  };
  auto exhausted = [&](const char* what, std::size_t have, std::size_t want) {
    throw ConfigError(std::string("lexicon exhausted: ") + std::to_string(want) + " distinct " + what +
                      " needed but only " + std::to_string(have) + " available; supply a larger lexicon");
  };

  std::vector<std::string> places = shuffled(tmpl.places);
  std::vector<std::string> names = shuffled(tmpl.names);
  std::vector<std::string> artifacts = shuffled(tmpl.artifacts);
  const std::size_t negatives_needed = static_cast<std::size_t>(n_docs - 2);

  std::vector<Scenario> scenarios;
  switch (tmpl.kind) {
    case ScenarioKind::kRedundancy:
      if (places.size() < need) exhausted("places", places.size(), need);
      for (std::size_t i = 0; i < need; ++i) scenarios.push_back(redundancy_scenario(places[i], fill));
      break;
    case ScenarioKind::kComplementarity:
      if (names.size() < 2 * need) exhausted("names", names.size(), 2 * need);
      if (artifacts.size() < need) exhausted("artifacts", artifacts.size(), need);
      for (std::size_t i = 0; i < need; ++i) {
        scenarios.push_back(complementarity_scenario(names[2 * i], names[2 * i + 1], artifacts[i], fill));
      }
      break;
    case ScenarioKind::kSynergy: {
      if (places.size() < need) exhausted("places", places.size(), need);
      // One capital plus three decoy towns per scenario.
      if (artifacts.size() < 4 * need) exhausted("artifacts", artifacts.size(), 4 * need);
      for (std::size_t i = 0; i < need; ++i) {
        const std::vector<std::string> towns(artifacts.begin() + static_cast<std::ptrdiff_t>(4 * i + 1),
                                             artifacts.begin() + static_cast<std::ptrdiff_t>(4 * i + 4));
        scenarios.push_back(synergy_scenario(places[i], artifacts[4 * i], towns, fill));
      }
      break;
    }
    case ScenarioKind::kNone:
      break;
  }

  std::vector<QueryCase> out;
  const std::string kind_name(to_string(tmpl.kind));
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& s = scenarios[i];
    if (s.negatives.size() < negatives_needed) exhausted("negative sentences", s.negatives.size(), negatives_needed);
    char base[64];
    std::snprintf(base, sizeof base, "%s-%03zu", kind_name.c_str(), i + 1);

    for (const bool swapped : {false, true}) {
      QueryCase c;
      c.case_id = std::string(base) + (swapped ? "-BA" : "-AB");
      c.query = s.query;
      c.scenario = tmpl.kind;
      c.extra["expected_answer"] = s.answer;
      c.documents.resize(static_cast<std::size_t>(n_docs));
      const int at_a = swapped ? pos_b : pos_a;
      const int at_b = swapped ? pos_a : pos_b;
      c.documents[static_cast<std::size_t>(at_a)] = {std::string(base) + "-A", s.positive_a, DocLabel::kRelevant};
      c.documents[static_cast<std::size_t>(at_b)] = {std::string(base) + "-B", s.positive_b, DocLabel::kRelevant};
      std::size_t next_negative = 0;
      for (int slot = 0; slot < n_docs; ++slot) {
        if (slot == at_a || slot == at_b) continue;
        c.documents[static_cast<std::size_t>(slot)] = {std::string(base) + "-N" + std::to_string(next_negative + 1),
                                                       s.negatives[next_negative], DocLabel::kHardNegative};
        ++next_negative;
      }
      c.positive_pair = std::pair{at_a, at_b};
      c.validate();
      out.push_back(std::move(c));
    }
  }
  return out;
}

GameSpec attach_synthetic_game(const QueryCase& c, std::vector<double> weights, double pair_value,
                               double noise_sigma, std::uint64_t noise_seed) {
  GameSpec g;
  switch (c.scenario) {
    case ScenarioKind::kRedundancy: g.kind = GameKind::kRedundancy; break;
    case ScenarioKind::kComplementarity: g.kind = GameKind::kComplementarity; break;
    case ScenarioKind::kSynergy: g.kind = GameKind::kSynergy; break;
    case ScenarioKind::kNone:
      throw ConfigError("case '" + c.case_id + "' has no scenario tag to derive a game from");
  }
  if (!c.positive_pair) throw ConfigError("case '" + c.case_id + "' has no positive_pair");
  if (static_cast<int>(weights.size()) != c.n()) {
    throw ConfigError("expected " + std::to_string(c.n()) + " background weights, got " +
                      std::to_string(weights.size()));
  }
  g.n = c.n();
  g.pair = *c.positive_pair;
  weights[static_cast<std::size_t>(g.pair.first)] = 0.0;
  weights[static_cast<std::size_t>(g.pair.second)] = 0.0;
  g.weights = std::move(weights);
  g.pair_value = pair_value;
  g.noise_sigma = noise_sigma;
  g.noise_seed = noise_seed;
  g.validate();
  return g;
}

}  // namespace ragattr
