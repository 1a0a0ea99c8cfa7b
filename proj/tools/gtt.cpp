#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gtt/agents/factory.hpp"
#include "gtt/analytics/export.hpp"
#include "gtt/analytics/probes.hpp"
#include "gtt/arena/server.hpp"
#include "gtt/campaign/runner.hpp"
#include "gtt/campaign/store.hpp"
#include "gtt/protocol/serialize.hpp"
#include "gtt/protocol/trial.hpp"
#include "gtt/theory/bounds.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitShortfall = 2;

std::string fixed3(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << x;
  return os.str();
}

std::function<void(std::string_view)> debug_log(const std::string& path) {
  if (path.empty()) return {};
  auto out = std::make_shared<std::ofstream>(path, std::ios::app);
  if (!*out) throw gtt::ConfigError("cannot open debug log " + path);
  auto mu = std::make_shared<std::mutex>();
  return [out, mu](std::string_view line) {
    std::lock_guard lock(*mu);
    *out << gtt::format_utc(gtt::Clock::now()) << ' ' << line << '\n';
    out->flush();
  };
}

gtt::BackendContext backend_context(const gtt::CampaignPlan& plan, const fs::path& base_dir,
                                    const std::string& debug_path) {
  gtt::BackendContext ctx;
  ctx.retry = plan.retry;
  ctx.limit = std::make_shared<gtt::InFlightLimit>(static_cast<std::ptrdiff_t>(plan.max_in_flight));
  ctx.debug_sink = debug_log(debug_path);
  ctx.base_dir = base_dir;
  return ctx;
}

struct RunArgs {
  std::string plan;
  std::string out;
  bool resume = false;
  std::size_t parallel = 0;
  std::string prompts;
  std::string debug_http;
};

int cmd_run(const RunArgs& a) {
  const gtt::CampaignPlan plan = gtt::CampaignPlan::from_toml_file(a.plan);
  auto registry = std::make_shared<gtt::AgentRegistry>(
      plan.models, backend_context(plan, fs::path(a.plan).parent_path(), a.debug_http));

  std::optional<gtt::PromptTemplates> templates;
  if (!a.prompts.empty()) templates = gtt::PromptTemplates::from_directory(a.prompts);

  gtt::RunOptions options;
  options.resume = a.resume;
  if (a.parallel > 0) options.parallelism = a.parallel;
  options.templates = templates ? &*templates : nullptr;
  options.progress = [](std::string_view line) { std::cerr << line << '\n'; };

  const gtt::CampaignSummary s = gtt::run_campaign(plan, gtt::registry_resolver(registry), a.out, options);
  std::cout << "pairs " << s.pairs << ", requested " << s.requested << ", already complete " << s.already_complete
            << ", completed " << s.completed << ", failed attempts " << s.failed_attempts << '\n';
  for (const auto& f : s.shortfalls) {
    std::cout << "shortfall " << f.trial_id << " (" << f.pair << ") after " << f.attempts
              << " attempt(s): " << f.last_reason << '\n';
  }
  return s.ok() ? kExitOk : kExitShortfall;
}

int cmd_aggregate(const std::string& dir, const std::string& out) {
  const gtt::AggregateReport r = gtt::aggregate_run(gtt::RunDirectory(dir));
  if (out.empty()) {
    gtt::write_counts_csv(std::cout, r.table);
  } else {
    std::ofstream os(out);
    gtt::write_counts_csv(os, r.table);
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& [file, err] : r.corrupt) std::cerr << "corrupt: " << file.string() << ": " << err << '\n';
  return r.ok() ? kExitOk : kExitError;
}

void print_score_table(const gtt::ScoreTable& t) {
  std::cout << std::left << std::setw(28) << "model" << std::right << std::setw(8) << "T" << std::setw(8) << "F"
            << std::setw(8) << "D" << '\n';
  std::vector<gtt::ScoreRow> rows = t.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.turing > b.turing; });
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(28) << r.model << std::right << std::setw(8) << fixed3(r.turing)
              << std::setw(8) << fixed3(r.fooling) << std::setw(8) << fixed3(r.distinguishing) << '\n';
  }
}

int cmd_scores(const std::string& dir, const std::string& pool, const std::string& out_dir, bool as_json) {
  const gtt::AggregateReport r = gtt::aggregate_run(gtt::RunDirectory(dir));
  const auto fds = gtt::fixed_distinguishers(r.table);
  json j = json::object();

  std::optional<gtt::ScoreTable> scores;
  bool has_plain = false;
  for (const auto& [key, c] : r.table.cells) has_plain = has_plain || !key.fixed();
  if (has_plain) scores = gtt::turing_scores(r.table, gtt::self_pool_from_string(pool));

  std::vector<gtt::FdScoreRow> fd_rows;
  for (const auto& d : fds) {
    auto rows = gtt::fd_turing_scores(r.table, d);
    fd_rows.insert(fd_rows.end(), rows.begin(), rows.end());
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    if (scores) {
      std::ofstream os(fs::path(out_dir) / "scores.csv");
      gtt::write_scores_csv(os, *scores);
    }
    if (!fd_rows.empty()) {
      std::ofstream os(fs::path(out_dir) / "fd_scores.csv");
      gtt::write_fd_scores_csv(os, fd_rows);
    }
  }

  if (as_json) {
    if (scores) j["scores"] = *scores;
    if (!fd_rows.empty()) j["fd_scores"] = fd_rows;
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }
  if (scores) {
    std::cout << "Turing scores (self term from " << scores->self_pool << ", universe " << scores->universe
              << ")\n";
    print_score_table(*scores);
  }
  for (const auto& row : fd_rows) {
    std::cout << "FD " << row.distinguisher << " / " << row.model << ": T_D " << fixed3(row.turing) << ", F_D "
              << fixed3(row.fooling) << ", R_D " << fixed3(row.resistance) << '\n';
  }
  return kExitOk;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

struct GraphArgs {
  std::string dir;
  double epsilon = 0.005;
  std::string format = "dot";
  std::string distinguisher;
  std::string grid;
  std::string matrix_dir;
};

int cmd_graph(const GraphArgs& a) {
  const gtt::AggregateReport r = gtt::aggregate_run(gtt::RunDirectory(a.dir));
  const std::optional<std::string> d = a.distinguisher.empty() ? std::nullopt : std::optional(a.distinguisher);
  const gtt::DMatrix m = gtt::d_matrix(r.table, d);

  if (!a.matrix_dir.empty()) {
    fs::create_directories(a.matrix_dir);
    std::ofstream dh(fs::path(a.matrix_dir) / "d_hat.csv");
    gtt::write_matrix_csv(dh, m, gtt::MatrixField::kDHat);
    std::ofstream se(fs::path(a.matrix_dir) / "se.csv");
    gtt::write_matrix_csv(se, m, gtt::MatrixField::kSe);
  }
  if (!a.grid.empty()) {
    gtt::write_curve_csv(std::cout, gtt::epsilon_curve(m, parse_grid(a.grid)));
    return kExitOk;
  }
  const gtt::RelationGraph g = gtt::relation_at_epsilon(m, a.epsilon);
  if (a.format == "json") {
    std::cout << json(g).dump(2) << '\n';
  } else {
    gtt::write_dot(std::cout, g);
  }
  return kExitOk;
}

int cmd_probes(const std::string& dir, const std::string& rules_path, bool as_json) {
  const gtt::ProbeRules rules =
      rules_path.empty() ? gtt::ProbeRules::defaults() : gtt::ProbeRules::from_file(rules_path);
  const gtt::RunDirectory run(dir);
  const gtt::LoadResult loaded = run.load_trials();
  std::vector<gtt::TrialRecord> records;
  for (const auto& s : loaded.records) records.push_back(s.record);
  const gtt::ProbeReport r = gtt::probe_report(records, rules);
  if (as_json) {
    std::cout << json(r).dump(2) << '\n';
  } else {
    std::cout << "rules " << r.rules_version << ": " << r.units << " question units from " << r.messages
              << " distinguisher messages across " << r.trials << " trials\n"
              << "capability probes   " << fixed3(r.capability_fraction()) << '\n'
              << "signature probes    " << fixed3(r.signature_fraction()) << '\n'
              << "first-turn signature " << fixed3(r.first_turn_signature_fraction()) << '\n';
  }
  for (const auto& [file, err] : loaded.corrupt) std::cerr << "corrupt: " << file.string() << ": " << err << '\n';
  return loaded.corrupt.empty() ? kExitOk : kExitError;
}

int cmd_theory(const std::string& which, std::size_t instances, std::uint64_t seed, bool as_json) {
  std::vector<gtt::Theorem> theorems;
  if (which == "all") {
    theorems = {gtt::Theorem::kP1, gtt::Theorem::kT2, gtt::Theorem::kT3, gtt::Theorem::kT4};
  } else {
    theorems = {gtt::theorem_from_string(which)};
  }
  bool all_ok = true;
  json out = json::array();
  for (auto t : theorems) {
    const gtt::SuiteReport r = gtt::run_theorem_suite(t, instances, seed);
    all_ok = all_ok && r.all_passed();
    if (as_json) {
      out.push_back(r);
      continue;
    }
    std::cout << gtt::to_string(t) << ": " << r.passed << "/" << r.instances << " passed, worst slack "
              << r.worst_slack << " (" << r.worst_check << ", instance " << r.worst_index << ")";
    if (r.rejected) std::cout << ", " << r.rejected << " rejected";
    std::cout << '\n';
    for (const auto& [check, n] : r.failures_by_check) std::cout << "  failed " << check << ": " << n << '\n';
    for (const auto& [check, n] : r.informational_total) {
      std::cout << "  informational " << check << ": " << r.informational_passed.at(check) << "/" << n << '\n';
    }
  }
  if (as_json) std::cout << out.dump(2) << '\n';
  return all_ok ? kExitOk : kExitError;
}

struct ArenaArgs {
  std::string roster;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store = "arena_sessions.jsonl";
  std::size_t ttl = 1800;
  std::size_t budget = 40;
  std::string ui;
  std::string debug_http;
};

gtt::ArenaServer* g_server = nullptr;

int cmd_arena(const ArenaArgs& a) {
  gtt::CampaignPlan defaults;
  gtt::ArenaConfig cfg;
  cfg.roster = std::make_shared<gtt::AgentRegistry>(
      gtt::load_roster(a.roster), backend_context(defaults, fs::path(a.roster).parent_path(), a.debug_http));
  cfg.max_distinguisher_turns = a.budget;
  cfg.ttl = std::chrono::seconds(a.ttl);
  if (!a.store.empty()) cfg.store = a.store;
  cfg.env = gtt::capture_env();

  auto service = std::make_shared<gtt::ArenaService>(std::move(cfg));
  gtt::ArenaServer server(service, a.ui.empty() ? std::nullopt : std::optional<fs::path>(a.ui));
  const int port = server.bind(a.host, a.port);
  if (port < 0) {
    std::cerr << "cannot bind " << a.host << ":" << a.port << '\n';
    return kExitError;
  }
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  std::cerr << "arena listening on http://" << a.host << ":" << port << '\n';
  server.serve();
  g_server = nullptr;
  return kExitOk;
}

struct TrialArgs {
  std::string plan;
  std::string actor;
  std::string target;
  std::string distinguisher;
  std::string secret;
  std::uint64_t seed = 0;
};

int cmd_trial(const TrialArgs& a) {
  const gtt::CampaignPlan plan = gtt::CampaignPlan::from_toml_file(a.plan);
  gtt::AgentRegistry registry(plan.models, backend_context(plan, fs::path(a.plan).parent_path(), ""));

  gtt::TrialSlot slot;
  slot.pair = {a.actor, a.target, a.distinguisher.empty() ? std::nullopt : std::optional(a.distinguisher)};
  slot.trial_id = "single__" + gtt::sanitize_id(a.actor) + "__" + gtt::sanitize_id(a.target);
  slot.seed = a.seed;
  slot.secret = a.secret.empty() ? gtt::draw_secret(a.seed) : gtt::secret_from_string(a.secret);

  gtt::TrialAgents agents{registry.agent(a.actor), registry.agent(a.target), nullptr};
  if (slot.pair.fixed_distinguisher) agents.fixed_distinguisher = registry.agent(*slot.pair.fixed_distinguisher);
  const gtt::TrialRecord record = gtt::run_trial(slot.config(plan, 1), agents);
  std::cout << json(record).dump(2) << '\n';
  return record.failed() ? kExitError : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Turing Test engine"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Play every trial of a campaign plan");
  run_cmd->add_option("--plan", run.plan, "Plan file (TOML)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out, "Run directory")->required();
  run_cmd->add_flag("--resume", run.resume, "Continue an existing run directory");
  run_cmd->add_option("--parallel", run.parallel, "Concurrent trials (overrides the plan)");
  run_cmd->add_option("--prompts", run.prompts, "Directory overriding prompt templates")
      ->check(CLI::ExistingDirectory);
  run_cmd->add_option("--debug-http", run.debug_http, "Append redacted request/response bodies to this file");

  std::string agg_dir, agg_out;
  auto* agg_cmd = app.add_subcommand("aggregate", "Per-pair verdict counts of a run directory");
  agg_cmd->add_option("dir", agg_dir)->required()->check(CLI::ExistingDirectory);
  agg_cmd->add_option("--out", agg_out, "Write the CSV here instead of stdout");

  std::string scores_dir, scores_pool = "self_pair_cell", scores_out;
  bool scores_json = false;
  auto* scores_cmd = app.add_subcommand("scores", "Turing and fixed-distinguisher scores");
  scores_cmd->add_option("dir", scores_dir)->required()->check(CLI::ExistingDirectory);
  scores_cmd->add_option("--self-pool", scores_pool, "self_pair_cell or pooled")
      ->check(CLI::IsMember({"self_pair_cell", "pooled"}));
  scores_cmd->add_option("--out-dir", scores_out, "Also write full-precision CSVs here");
  scores_cmd->add_flag("--json", scores_json);

  GraphArgs graph;
  auto* graph_cmd = app.add_subcommand("graph", "Thresholded comparator graph");
  graph_cmd->add_option("dir", graph.dir)->required()->check(CLI::ExistingDirectory);
  graph_cmd->add_option("--epsilon", graph.epsilon, "Edge threshold (inclusive)");
  graph_cmd->add_option("--format", graph.format)->check(CLI::IsMember({"dot", "json"}));
  graph_cmd->add_option("--distinguisher", graph.distinguisher, "Use this fixed distinguisher's cells");
  graph_cmd->add_option("--grid", graph.grid, "Comma-separated epsilons; prints the edge-count curve");
  graph_cmd->add_option("--matrix-dir", graph.matrix_dir, "Write d_hat.csv and se.csv here");

  std::string probes_dir, probes_rules;
  bool probes_json = false;
  auto* probes_cmd = app.add_subcommand("probes", "Question-unit statistics of distinguisher messages");
  probes_cmd->add_option("dir", probes_dir)->required()->check(CLI::ExistingDirectory);
  probes_cmd->add_option("--rules", probes_rules, "Rule table (JSON)")->check(CLI::ExistingFile);
  probes_cmd->add_flag("--json", probes_json);

  std::string theory_which = "all";
  std::size_t theory_instances = 200;
  std::uint64_t theory_seed = 7;
  bool theory_json = false;
  auto* theory_cmd = app.add_subcommand("theory", "Check the bounds on random exact instances");
  theory_cmd->add_option("--theorem", theory_which, "all, P1, T2, T3 or T4");
  theory_cmd->add_option("--instances", theory_instances);
  theory_cmd->add_option("--seed", theory_seed);
  theory_cmd->add_flag("--json", theory_json);

  ArenaArgs arena;
  auto* arena_cmd = app.add_subcommand("arena", "Serve the live arena HTTP API");
  arena_cmd->add_option("--roster", arena.roster, "TOML file with [[models]]")->required()->check(CLI::ExistingFile);
  arena_cmd->add_option("--host", arena.host);
  arena_cmd->add_option("--port", arena.port);
  arena_cmd->add_option("--store", arena.store, "Session log (JSON lines)");
  arena_cmd->add_option("--ttl", arena.ttl, "Idle session lifetime in seconds");
  arena_cmd->add_option("--budget", arena.budget, "Distinguisher turn budget");
  arena_cmd->add_option("--ui", arena.ui, "Static files to serve at /")->check(CLI::ExistingDirectory);
  arena_cmd->add_option("--debug-http", arena.debug_http);

  TrialArgs trial;
  auto* trial_cmd = app.add_subcommand("trial", "Play one trial and print its record");
  trial_cmd->add_option("--plan", trial.plan)->required()->check(CLI::ExistingFile);
  trial_cmd->add_option("--actor", trial.actor)->required();
  trial_cmd->add_option("--target", trial.target)->required();
  trial_cmd->add_option("--distinguisher", trial.distinguisher);
  trial_cmd->add_option("--secret", trial.secret)->check(CLI::IsMember({"target", "imitator"}));
  trial_cmd->add_option("--seed", trial.seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*agg_cmd) return cmd_aggregate(agg_dir, agg_out);
    if (*scores_cmd) return cmd_scores(scores_dir, scores_pool, scores_out, scores_json);
    if (*graph_cmd) return cmd_graph(graph);
    if (*probes_cmd) return cmd_probes(probes_dir, probes_rules, probes_json);
    if (*theory_cmd) return cmd_theory(theory_which, theory_instances, theory_seed, theory_json);
    if (*arena_cmd) return cmd_arena(arena);
    if (*trial_cmd) return cmd_trial(trial);
  } catch (const gtt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
