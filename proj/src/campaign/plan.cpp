#include "gtt/campaign/plan.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "gtt/common/errors.hpp"
#include "gtt/protocol/trial.hpp"

namespace gtt {

using json = nlohmann::json;

std::string_view to_string(BranchAssignment b) { return b == BranchAssignment::kIid ? "iid" : "stratified"; }

BranchAssignment branch_assignment_from_string(std::string_view s) {
  if (s == "stratified") return BranchAssignment::kStratified;
  if (s == "iid") return BranchAssignment::kIid;
  throw ConfigError("unknown branch assignment: " + std::string(s));
}

void CampaignPlan::validate() const {
  if (trials_per_ordered_pair == 0) throw ConfigError("trials_per_ordered_pair must be at least 1");
  if (max_attempts_per_trial == 0) throw ConfigError("max_attempts_per_trial must be at least 1");
  if (parallelism == 0) throw ConfigError("parallelism must be at least 1");
  if (max_in_flight == 0) throw ConfigError("max_in_flight must be at least 1");
  if (models.empty()) throw ConfigError("plan lists no models");
  if (models.size() < 2 && !include_self_pairs) throw ConfigError("plan needs two models or self-pairs");
  std::set<std::string> ids;
  std::set<std::string> files;
  for (const auto& m : models) {
    m.validate();
    if (!ids.insert(m.id).second) throw ConfigError("duplicate model id '" + m.id + "'");
    if (!files.insert(sanitize_id(m.id)).second) {
      throw ConfigError("model ids collide after sanitising: '" + m.id + "'");
    }
  }
  for (const auto& d : protocol.fixed_distinguishers) {
    if (!ids.contains(d)) throw ConfigError("unknown model '" + d + "' as fixed distinguisher");
  }
  retry.validate();
  if (protocol.max_distinguisher_turns == 0 || protocol.max_specimen_turns == 0) {
    throw ConfigError("turn budgets must be at least 1");
  }
  if (protocol.controlled_query_budget && !protocol.actor_query_phase) {
    throw ConfigError("controlled_query_budget needs actor_query_phase");
  }
  if (protocol.controlled_turn_budget && !protocol.fixed_distinguishers.empty()) {
    throw ConfigError("controlled_turn_budget is not supported with fixed distinguishers");
  }
}

std::vector<std::string> CampaignPlan::model_ids() const {
  std::vector<std::string> out;
  for (const auto& m : models) out.push_back(m.id);
  return out;
}

const ModelSpec& CampaignPlan::model(const std::string& id) const {
  for (const auto& m : models) {
    if (m.id == id) return m;
  }
  throw ConfigError("unknown model '" + id + "'");
}

namespace {

json toml_to_json(std::string_view text, std::string_view what) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << what << ": " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(os.str());
  }
  std::ostringstream os;
  os << toml::json_formatter{table};
  return json::parse(os.str());
}

std::string slurp(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + std::string(what) + " " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

CampaignPlan CampaignPlan::from_toml(std::string_view text) {
  CampaignPlan plan;
  try {
    plan = toml_to_json(text, "plan").get<CampaignPlan>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

CampaignPlan CampaignPlan::from_toml_file(const std::filesystem::path& path) {
  return from_toml(slurp(path, "plan"));
}

std::vector<ModelSpec> load_roster(const std::filesystem::path& path) {
  std::vector<ModelSpec> models;
  try {
    models = toml_to_json(slurp(path, "roster"), "roster").at("models").get<std::vector<ModelSpec>>();
  } catch (const json::exception& e) {
    throw ConfigError("roster: " + std::string(e.what()));
  }
  if (models.empty()) throw ConfigError("roster lists no models");
  for (const auto& m : models) m.validate();
  return models;
}

void to_json(json& j, const CampaignPlan& p) {
  json protocol = {{"actor_query_phase", p.protocol.actor_query_phase},
                   {"distinguisher_query_phase", p.protocol.distinguisher_query_phase},
                   {"fixed_distinguishers", p.protocol.fixed_distinguishers},
                   {"max_distinguisher_turns", p.protocol.max_distinguisher_turns},
                   {"max_specimen_turns", p.protocol.max_specimen_turns}};
  if (p.protocol.controlled_turn_budget) protocol["controlled_turn_budget"] = *p.protocol.controlled_turn_budget;
  if (p.protocol.controlled_query_budget) protocol["controlled_query_budget"] = *p.protocol.controlled_query_budget;
  j = {{"models", p.models},
       {"protocol", std::move(protocol)},
       {"trials_per_ordered_pair", p.trials_per_ordered_pair},
       {"include_self_pairs", p.include_self_pairs},
       {"max_attempts_per_trial", p.max_attempts_per_trial},
       {"parallelism", p.parallelism},
       {"max_in_flight", p.max_in_flight},
       {"seed", p.seed},
       {"branch_assignment", to_string(p.branches)},
       {"retry",
        {{"request_timeout", p.retry.request_timeout.count()},
         {"backoff_base", p.retry.backoff_base.count()},
         {"backoff_factor", p.retry.backoff_factor},
         {"backoff_cap", p.retry.backoff_cap.count()},
         {"max_attempts", p.retry.max_attempts},
         {"jitter", p.retry.jitter}}}};
}

void from_json(const json& j, CampaignPlan& p) {
  p = {};
  p.models = j.at("models").get<std::vector<ModelSpec>>();
  if (j.contains("protocol")) {
    const json& q = j.at("protocol");
    p.protocol.actor_query_phase = q.value("actor_query_phase", false);
    p.protocol.distinguisher_query_phase = q.value("distinguisher_query_phase", false);
    p.protocol.fixed_distinguishers = q.value("fixed_distinguishers", std::vector<std::string>{});
    p.protocol.max_distinguisher_turns = q.value("max_distinguisher_turns", std::size_t{40});
    p.protocol.max_specimen_turns = q.value("max_specimen_turns", std::size_t{20});
    if (q.contains("controlled_turn_budget")) p.protocol.controlled_turn_budget = q.at("controlled_turn_budget");
    if (q.contains("controlled_query_budget")) p.protocol.controlled_query_budget = q.at("controlled_query_budget");
  }
  p.trials_per_ordered_pair = j.value("trials_per_ordered_pair", std::size_t{10});
  p.include_self_pairs = j.value("include_self_pairs", true);
  p.max_attempts_per_trial = j.value("max_attempts_per_trial", std::size_t{3});
  p.parallelism = j.value("parallelism", std::size_t{1});
  p.max_in_flight = j.value("max_in_flight", std::size_t{16});
  p.seed = j.value("seed", std::uint64_t{0});
  p.branches = branch_assignment_from_string(j.value("branch_assignment", std::string("stratified")));
  if (j.contains("retry")) {
    const json& r = j.at("retry");
    p.retry.request_timeout = Seconds(r.value("request_timeout", 480.0));
    p.retry.backoff_base = Seconds(r.value("backoff_base", 1.0));
    p.retry.backoff_factor = r.value("backoff_factor", 2.0);
    p.retry.backoff_cap = Seconds(r.value("backoff_cap", 60.0));
    p.retry.max_attempts = r.value("max_attempts", std::size_t{6});
    p.retry.jitter = r.value("jitter", true);
  }
}

std::string PairSpec::label() const {
  std::string out = actor + "->" + target;
  if (fixed_distinguisher) out += "@" + *fixed_distinguisher;
  return out;
}

std::string sanitize_id(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.';
    out += keep ? c : '_';
  }
  return out;
}

std::vector<PairSpec> enumerate_pairs(const CampaignPlan& plan) {
  std::vector<std::optional<std::string>> judges;
  if (plan.protocol.fixed_distinguishers.empty()) {
    judges.emplace_back(std::nullopt);
  } else {
    for (const auto& d : plan.protocol.fixed_distinguishers) judges.emplace_back(d);
  }
  std::vector<PairSpec> out;
  for (const auto& d : judges) {
    for (const auto& a : plan.models) {
      for (const auto& b : plan.models) {
        if (a.id == b.id && !plan.include_self_pairs) continue;
        if (d && (a.id == *d || b.id == *d)) continue;
        out.push_back({a.id, b.id, d});
      }
    }
  }
  return out;
}

std::vector<TrialSlot> enumerate_trials(const CampaignPlan& plan) {
  std::vector<TrialSlot> out;
  const std::size_t n = plan.trials_per_ordered_pair;
  for (const auto& pair : enumerate_pairs(plan)) {
    std::string stem = sanitize_id(pair.actor) + "__" + sanitize_id(pair.target);
    if (pair.fixed_distinguisher) stem += "__by__" + sanitize_id(*pair.fixed_distinguisher);
    const std::uint64_t pair_seed = combine_seed(plan.seed, stable_hash(stem));
    for (std::size_t k = 0; k < n; ++k) {
      TrialSlot slot;
      slot.pair = pair;
      slot.index = k;
      slot.trial_id = stem + "__t" + std::to_string(k);
      slot.seed = combine_seed(pair_seed, k);
      if (plan.branches == BranchAssignment::kIid || (k + 1 == n && n % 2 == 1)) {
        slot.secret = draw_secret(slot.seed);
      } else {
        const bool target_first = draw_secret(combine_seed(pair_seed, n + k / 2)) == SecretIdentity::kTarget;
        const bool first = k % 2 == 0;
        slot.secret = (first == target_first) ? SecretIdentity::kTarget : SecretIdentity::kImitator;
      }
      out.push_back(std::move(slot));
    }
  }
  return out;
}

TrialConfig TrialSlot::config(const CampaignPlan& plan, std::size_t attempt) const {
  TrialConfig c;
  c.variant.actor = pair.actor;
  c.variant.target = pair.target;
  c.variant.fixed_distinguisher = pair.fixed_distinguisher;
  c.variant.actor_query_phase = plan.protocol.actor_query_phase;
  c.variant.distinguisher_query_phase = plan.protocol.distinguisher_query_phase;
  c.max_distinguisher_turns = plan.protocol.max_distinguisher_turns;
  c.max_specimen_turns = plan.protocol.max_specimen_turns;
  c.controlled_turn_budget = plan.protocol.controlled_turn_budget;
  c.controlled_query_budget = plan.protocol.controlled_query_budget;
  c.rng_seed = combine_seed(seed, attempt);
  c.trial_id = trial_id;
  c.target_slug = plan.model(pair.target).slug();
  c.forced_secret = secret;
  return c;
}

}  // namespace gtt
