#include "gtt/campaign/runner.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "gtt/agents/factory.hpp"
#include "gtt/campaign/store.hpp"
#include "gtt/common/errors.hpp"
#include "gtt/protocol/serialize.hpp"
#include "gtt/protocol/trial.hpp"

namespace gtt {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json comparable_plan(const CampaignPlan& plan) {
  json j = plan;
  j.erase("parallelism");
  j.erase("max_in_flight");
  return j;
}

json comparable_plan(json j) {
  j.erase("parallelism");
  j.erase("max_in_flight");
  return j;
}

void prepare_directory(const RunDirectory& dir, const CampaignPlan& plan, const RunOptions& options,
                       const EnvBlock& env) {
  if (dir.has_manifest()) {
    if (!options.resume) {
      throw ConfigError(dir.root().string() + " already holds a run; pass --resume to continue it");
    }
    const json manifest = dir.read_manifest();
    if (!manifest.contains("plan") || comparable_plan(manifest.at("plan")) != comparable_plan(plan)) {
      throw ConfigError("plan does not match the manifest in " + dir.root().string());
    }
    dir.create();
    dir.remove_temp_files();
    return;
  }
  if (fs::exists(dir.root()) && !fs::is_empty(dir.root())) {
    throw ConfigError(dir.root().string() + " is not empty and has no manifest");
  }
  dir.create();
  json env_json = json::object();
  for (const auto& [k, v] : env) env_json[k] = v ? json(*v) : json(nullptr);
  dir.write_manifest({{"schema_version", kTrialSchemaVersion},
                      {"created", format_utc(Clock::now())},
                      {"plan", plan},
                      {"env", std::move(env_json)}});
}

}  // namespace

CampaignSummary run_campaign(const CampaignPlan& plan, const AgentResolver& resolve, const fs::path& out,
                             const RunOptions& options) {
  plan.validate();
  const EnvBlock env = options.env ? *options.env : capture_env();
  const RunDirectory dir(out);
  prepare_directory(dir, plan, options, env);

  const std::vector<TrialSlot> slots = enumerate_trials(plan);
  const auto failed_before = dir.failed_attempt_counts();

  CampaignSummary summary;
  summary.pairs = enumerate_pairs(plan).size();
  summary.requested = slots.size();

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr first_error;

  auto report = [&](const std::string& line) {
    if (options.progress) {
      std::lock_guard lock(mu);
      options.progress(line);
    }
  };

  auto play = [&](const TrialSlot& slot) {
    if (dir.has_trial(slot.trial_id)) {
      std::lock_guard lock(mu);
      ++summary.already_complete;
      return;
    }
    const auto it = failed_before.find(slot.trial_id);
    const std::size_t used = it == failed_before.end() ? 0 : it->second;

    TrialAgents agents;
    agents.actor = resolve(slot.pair.actor);
    agents.target = resolve(slot.pair.target);
    if (slot.pair.fixed_distinguisher) agents.fixed_distinguisher = resolve(*slot.pair.fixed_distinguisher);
    TrialOptions trial_options;
    trial_options.templates = options.templates;

    std::string last_reason = used > 0 ? "attempts used before resume" : "";
    std::size_t attempts = used;
    for (std::size_t attempt = used + 1; attempt <= plan.max_attempts_per_trial; ++attempt) {
      if (abort) return;
      TrialRecord record = run_trial(slot.config(plan, attempt), agents, trial_options);
      record.env = env;
      attempts = attempt;
      if (!record.failed() && record.parsed.analyzable()) {
        dir.write_trial(record, attempt);
        std::lock_guard lock(mu);
        ++summary.completed;
        return;
      }
      last_reason = record.failed() ? "backend: " + record.failure->message : "unparseable";
      dir.write_failed(record, attempt, record.failed() ? "backend" : "unparseable");
      {
        std::lock_guard lock(mu);
        ++summary.failed_attempts;
      }
      report(slot.trial_id + " attempt " + std::to_string(attempt) + " failed (" + last_reason + ")");
    }
    std::lock_guard lock(mu);
    summary.shortfalls.push_back({slot.trial_id, slot.pair.label(), attempts, last_reason});
  };

  auto worker = [&] {
    for (;;) {
      if (abort) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= slots.size()) return;
      try {
        play(slots[i]);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first_error) first_error = std::current_exception();
        abort = true;
        return;
      }
    }
  };

  const std::size_t threads = std::min(options.parallelism.value_or(plan.parallelism), slots.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  std::sort(summary.shortfalls.begin(), summary.shortfalls.end(),
            [](const Shortfall& a, const Shortfall& b) { return a.trial_id < b.trial_id; });
  dir.write_results_csv(dir.load_trials().records);
  report("completed " + std::to_string(summary.completed) + ", skipped " + std::to_string(summary.already_complete) +
         ", shortfalls " + std::to_string(summary.shortfalls.size()));
  return summary;
}

AgentResolver registry_resolver(std::shared_ptr<AgentRegistry> registry) {
  return [registry = std::move(registry)](const std::string& id) { return registry->agent(id); };
}

}  // namespace gtt
