#include "support/support.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gtt/protocol/trial.hpp"
#include "gtt/theory/builders.hpp"

#ifndef GTT_TEST_DATA_DIR
#error "GTT_TEST_DATA_DIR must point at tests/data"
#endif

namespace gtt::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string pattern = (fs::temp_directory_path() / "gtt-test-XXXXXX").string();
  if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path data_dir() { return GTT_TEST_DATA_DIR; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::map<std::string, std::string>> read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    return out;
  };
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) throw std::runtime_error("ragged row in " + path.string() + ": " + line);
    auto& row = rows.emplace_back();
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = fields[i];
  }
  return rows;
}

ModelSpec scripted_model(const std::string& id) {
  ModelSpec spec;
  spec.id = id;
  spec.kind = BackendKind::kScripted;
  const std::string signature = "I am sig-" + id + ".";
  spec.scripts[AgentRole::kTarget] = Script{{signature}, {}};
  spec.scripts[AgentRole::kSpecimen] = Script{{signature}, {}};
  spec.scripts[AgentRole::kActor] = Script{{signature}, {}};
  spec.scripts[AgentRole::kDistinguisher] =
      Script{{"Who are you?", "<answer>0</answer>"}, {{"sig-" + id + ".", "<answer>1</answer>"}}};
  return spec;
}

CampaignPlan scripted_plan(std::size_t models, std::size_t trials, bool self_pairs) {
  CampaignPlan plan;
  for (std::size_t i = 0; i < models; ++i) plan.models.push_back(scripted_model("m" + std::to_string(i)));
  plan.trials_per_ordered_pair = trials;
  plan.include_self_pairs = self_pairs;
  plan.seed = 2024;
  plan.protocol.max_distinguisher_turns = 4;
  return plan;
}

AgentReply ListAgent::next_turn(const Conversation& conversation) {
  AgentReply r;
  r.content = replies_.at(std::min(conversation.own_turns(), replies_.size() - 1));
  r.route = {"scripted", "local", "list", "list"};
  return r;
}

AgentReply FlakyAgent::next_turn(const Conversation& conversation) {
  ++calls_;
  for (std::size_t left = remaining_.load(); left > 0; left = remaining_.load()) {
    if (remaining_.compare_exchange_weak(left, left - 1)) {
      throw BackendError("injected outage", {"attempt 1: HTTP 503"}, true);
    }
  }
  return inner_->next_turn(conversation);
}

AgentReply CountingAgent::next_turn(const Conversation& conversation) {
  ++calls_;
  return inner_->next_turn(conversation);
}

GameTables random_oracle_game(std::mt19937_64& rng) {
  const Symbols symbols = make_symbols(2 + rng() % 2);
  GameTables g;
  g.horizon = 2;
  const std::size_t answer_len = responder_length(g.horizon);
  g.distinguisher = random_mixture(rng, 2, [&] { return random_distinguisher(rng, symbols, g.horizon); });
  g.target_self = random_mixture(rng, 2, [&] { return random_responder(rng, symbols, answer_len); });
  if (rng() % 4 == 0) {
    g.query_cap = 1;
    const auto prefixes = query_transcripts(symbols, g.query_cap);
    g.imitator = random_mixture(rng, 2, [&] {
      return merge(random_querier(rng, symbols, g.query_cap), random_responder(rng, symbols, answer_len, prefixes));
    });
  } else {
    g.imitator = random_mixture(rng, 2, [&] { return random_responder(rng, symbols, answer_len); });
  }
  return g;
}

TabularPair tabular_agents(const GameTables& game) {
  TabularPair p{std::make_shared<TabularAgent>(), std::make_shared<TabularAgent>()};
  p.target->name = "T";
  p.target->self = game.target_self;
  p.target->distinguisher = game.distinguisher;
  p.actor->name = "A";
  p.actor->imitating["T"] = game.imitator;
  return p;
}

MonteCarlo simulate_game(const GameTables& game, std::size_t trials, std::uint64_t seed) {
  const TabularPair agents = tabular_agents(game);
  TrialConfig config;
  config.variant.actor = "A";
  config.variant.target = "T";
  config.variant.actor_query_phase = game.query_cap > 0;
  config.max_distinguisher_turns = game.horizon;
  config.max_specimen_turns = std::max<std::size_t>(game.query_cap, 1);
  const TrialAgents backends{agents.actor, agents.target, nullptr};
  const TrialOptions options{nullptr, [] { return Timestamp{}; }};

  MonteCarlo mc;
  for (std::size_t i = 0; i < trials; ++i) {
    config.rng_seed = combine_seed(seed, i);
    const TrialRecord r = run_trial(config, backends, options);
    if (!r.success) throw std::runtime_error("simulated trial without a verdict");
    ++mc.trials;
    if (*r.success) ++mc.successes;
  }
  return mc;
}

DMatrix random_d_matrix(std::mt19937_64& rng, std::size_t n, double missing) {
  DMatrix m;
  for (std::size_t i = 0; i < n; ++i) m.models.push_back("m" + std::to_string(i));
  m.d_hat.assign(n, std::vector<std::optional<double>>(n));
  m.se.assign(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || unit_uniform(rng) < missing) continue;
      const double u = unit_uniform(rng);
      m.d_hat[i][j] = rng() % 3 == 0 ? static_cast<double>(rng() % 11) / 20.0 - 0.25 : u - 0.5;
      m.se[i][j] = 0.1;
    }
  }
  return m;
}

namespace {

Adjacency closure(Adjacency a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) a[i][i] = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (a[i][k] && a[k][j]) a[i][j] = true;
      }
    }
  }
  return a;
}

std::vector<std::vector<std::size_t>> components(const Adjacency& reach) {
  const std::size_t n = reach.size();
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> placed(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (placed[i]) continue;
    auto& comp = out.emplace_back();
    for (std::size_t j = i; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) {
        comp.push_back(j);
        placed[j] = true;
      }
    }
  }
  return out;
}

}  // namespace

BruteRelation brute_relation(const DMatrix& d, double epsilon) {
  const std::size_t n = d.size();
  BruteRelation b;
  b.edges.assign(n, std::vector<bool>(n, false));
  b.strict_edges = b.edges;
  Adjacency mutual = b.edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      b.edges[i][j] = i != j && d.d_hat[i][j].has_value() && *d.d_hat[i][j] <= epsilon;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      b.strict_edges[i][j] = b.edges[i][j] && !b.edges[j][i];
      mutual[i][j] = b.edges[i][j] && b.edges[j][i];
    }
  }
  b.classes = components(closure(mutual));
  b.sccs = components(closure(b.edges));
  b.violations = brute_violations(b.edges);
  return b;
}

std::size_t brute_violations(const Adjacency& e) {
  const std::size_t n = e.size();
  std::size_t count = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        if (a != b && b != c && a != c && e[a][b] && e[b][c] && !e[a][c]) ++count;
      }
    }
  }
  return count;
}

std::string compare_relation(const RelationGraph& g, const BruteRelation& b) {
  std::size_t edges = 0, strict = 0;
  for (std::size_t i = 0; i < b.edges.size(); ++i) {
    for (std::size_t j = 0; j < b.edges.size(); ++j) {
      edges += b.edges[i][j];
      strict += b.strict_edges[i][j];
    }
  }
  if (g.edges != b.edges) return "edges differ";
  if (g.strict_edges != b.strict_edges) return "strict edges differ";
  if (g.edge_count != edges || g.strict_edge_count != strict) return "edge counts differ";
  if (g.classes != b.classes) return "classes differ";
  if (g.sccs != b.sccs) return "strongly connected components differ";
  if (g.violations != b.violations) {
    return "violations " + std::to_string(g.violations) + " vs " + std::to_string(b.violations);
  }
  return {};
}

std::vector<std::string> probe_fixture_mismatches(const ProbeRules& rules) {
  const auto fixture = nlohmann::json::parse(read_file(data_dir() / "probes_fixture.json"));
  std::vector<std::string> out;
  std::size_t n = 0;
  for (const auto& item : fixture.at("messages")) {
    const std::string message = item.at("message").get<std::string>();
    const auto units = extract_question_units(message, rules);
    const auto& expected = item.at("units");
    const std::string where = "message " + std::to_string(n++) + ": ";
    if (units.size() != expected.size()) {
      out.push_back(where + std::to_string(units.size()) + " units, expected " + std::to_string(expected.size()));
      continue;
    }
    for (std::size_t i = 0; i < units.size(); ++i) {
      const std::string text = expected[i].at("text").get<std::string>();
      const std::string label = expected[i].at("label").get<std::string>();
      if (units[i] != text) out.push_back(where + "unit '" + units[i] + "', expected '" + text + "'");
      const std::string got(to_string(classify_question_unit(units[i], rules)));
      if (got != label) out.push_back(where + "'" + units[i] + "' is " + got + ", expected " + label);
    }
  }
  return out;
}

}  // namespace gtt::testing
