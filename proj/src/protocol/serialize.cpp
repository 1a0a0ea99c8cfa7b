#include "gtt/protocol/serialize.hpp"

#include "gtt/common/errors.hpp"

namespace gtt {

using json = nlohmann::json;

namespace {

template <typename T>
json optional_value(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const ProtocolVariant& v) {
  j = {{"family", v.family()},
       {"actor", v.actor},
       {"target", v.target},
       {"fixed_distinguisher", optional_value(v.fixed_distinguisher)},
       {"actor_query_phase", v.actor_query_phase},
       {"distinguisher_query_phase", v.distinguisher_query_phase}};
}

void from_json(const json& j, ProtocolVariant& v) {
  v.actor = j.at("actor").get<std::string>();
  v.target = j.at("target").get<std::string>();
  v.fixed_distinguisher = read_optional<std::string>(j, "fixed_distinguisher");
  v.actor_query_phase = j.value("actor_query_phase", false);
  v.distinguisher_query_phase = j.value("distinguisher_query_phase", false);
}

void to_json(json& j, const TrialConfig& c) {
  j = {{"variant", c.variant},
       {"max_distinguisher_turns", c.max_distinguisher_turns},
       {"max_specimen_turns", c.max_specimen_turns},
       {"controlled_turn_budget", optional_value(c.controlled_turn_budget)},
       {"controlled_query_budget", optional_value(c.controlled_query_budget)},
       {"rng_seed", c.rng_seed},
       {"trial_id", c.trial_id},
       {"target_slug", optional_value(c.target_slug)},
       {"forced_secret", c.forced_secret ? json(to_string(*c.forced_secret)) : json(nullptr)}};
}

void from_json(const json& j, TrialConfig& c) {
  c.variant = j.at("variant").get<ProtocolVariant>();
  c.max_distinguisher_turns = j.at("max_distinguisher_turns").get<std::size_t>();
  c.max_specimen_turns = j.at("max_specimen_turns").get<std::size_t>();
  c.controlled_turn_budget = read_optional<std::size_t>(j, "controlled_turn_budget");
  c.controlled_query_budget = read_optional<std::size_t>(j, "controlled_query_budget");
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  c.trial_id = j.value("trial_id", std::string{});
  c.target_slug = read_optional<std::string>(j, "target_slug");
  const auto forced = read_optional<std::string>(j, "forced_secret");
  c.forced_secret = forced ? std::optional(secret_from_string(*forced)) : std::nullopt;
}

void to_json(json& j, const Message& m) {
  j = {{"index", m.index},
       {"channel", to_string(m.channel)},
       {"sender", to_string(m.sender)},
       {"content", m.content},
       {"timestamp", format_utc(m.timestamp)}};
}

void from_json(const json& j, Message& m) {
  m.index = j.at("index").get<std::size_t>();
  m.channel = channel_from_string(j.at("channel").get<std::string>());
  m.sender = sender_from_string(j.at("sender").get<std::string>());
  m.content = j.at("content").get<std::string>();
  m.timestamp = parse_utc(j.at("timestamp").get<std::string>());
}

void to_json(json& j, const ChatTurn& t) {
  j = {{"role", t.role == ChatRole::kUser ? "user" : "assistant"}, {"content", t.content}};
  if (t.dialogue) j["dialogue"] = *t.dialogue;
}

void from_json(const json& j, ChatTurn& t) {
  const auto role = j.at("role").get<std::string>();
  if (role != "user" && role != "assistant") throw DomainError("unknown chat role: " + role);
  t.role = role == "user" ? ChatRole::kUser : ChatRole::kAssistant;
  t.content = j.at("content").get<std::string>();
  t.dialogue = read_optional<std::string>(j, "dialogue");
}

void to_json(json& j, const ParsedAnswer& p) {
  j = {{"kind", to_string(p.kind)}, {"bit", optional_value(p.bit)}};
}

void from_json(const json& j, ParsedAnswer& p) {
  p.kind = answer_kind_from_string(j.at("kind").get<std::string>());
  p.bit = read_optional<int>(j, "bit");
}

void to_json(json& j, const RouteInfo& r) {
  j = {{"backend", r.backend}, {"provider", r.provider}, {"display_name", r.display_name}, {"model_id", r.model_id}};
}

void from_json(const json& j, RouteInfo& r) {
  r.backend = j.value("backend", std::string{});
  r.provider = j.value("provider", std::string{});
  r.display_name = j.value("display_name", std::string{});
  r.model_id = j.value("model_id", std::string{});
}

void to_json(json& j, const FailureInfo& f) {
  j = {{"kind", f.kind}, {"role", f.role}, {"message", f.message}, {"attempt_log", f.attempt_log}};
}

void from_json(const json& j, FailureInfo& f) {
  f.kind = j.at("kind").get<std::string>();
  f.role = j.value("role", std::string{});
  f.message = j.value("message", std::string{});
  f.attempt_log = j.value("attempt_log", std::vector<std::string>{});
}

void to_json(json& j, const TurnCounts& t) {
  j = {{"distinguisher", t.distinguisher},
       {"interlocutor", t.interlocutor},
       {"specimen_queries", t.specimen_queries},
       {"specimen_replies", t.specimen_replies},
       {"distinguisher_specimen_queries", t.distinguisher_specimen_queries},
       {"distinguisher_specimen_replies", t.distinguisher_specimen_replies}};
}

void from_json(const json& j, TurnCounts& t) {
  t.distinguisher = j.value("distinguisher", std::size_t{0});
  t.interlocutor = j.value("interlocutor", std::size_t{0});
  t.specimen_queries = j.value("specimen_queries", std::size_t{0});
  t.specimen_replies = j.value("specimen_replies", std::size_t{0});
  t.distinguisher_specimen_queries = j.value("distinguisher_specimen_queries", std::size_t{0});
  t.distinguisher_specimen_replies = j.value("distinguisher_specimen_replies", std::size_t{0});
}

void to_json(json& j, const TrialRecord& r) {
  json env = json::object();
  for (const auto& [k, v] : r.env) env[k] = optional_value(v);
  j = {{"schema_version", kTrialSchemaVersion},
       {"trial_id", r.config.trial_id},
       {"config", r.config},
       {"secret", to_string(r.secret)},
       {"prompts", {{"actor", r.actor_prompt}, {"distinguisher", r.distinguisher_prompt}}},
       {"first_distinguisher_message", r.first_distinguisher_message},
       {"raw_final_message", r.raw_final_message},
       {"parsed", r.parsed},
       {"success", optional_value(r.success)},
       {"turns", r.turns},
       {"early_answers_refused", r.early_answers_refused},
       {"transcript", r.transcript},
       {"histories", r.histories},
       {"routes", r.routes},
       {"env", std::move(env)},
       {"failure", r.failure ? json(*r.failure) : json(nullptr)}};
}

void from_json(const json& j, TrialRecord& r) {
  if (!j.contains("schema_version")) throw DomainError("trial JSON has no schema_version");
  const int version = j.at("schema_version").get<int>();
  if (version != kTrialSchemaVersion) {
    throw DomainError("unsupported trial schema_version " + std::to_string(version));
  }
  r = {};
  r.config = j.at("config").get<TrialConfig>();
  r.secret = secret_from_string(j.at("secret").get<std::string>());
  r.actor_prompt = j.at("prompts").value("actor", std::string{});
  r.distinguisher_prompt = j.at("prompts").value("distinguisher", std::string{});
  r.first_distinguisher_message = j.value("first_distinguisher_message", std::string{});
  r.raw_final_message = j.value("raw_final_message", std::string{});
  r.parsed = j.at("parsed").get<ParsedAnswer>();
  r.success = read_optional<bool>(j, "success");
  r.turns = j.at("turns").get<TurnCounts>();
  r.early_answers_refused = j.value("early_answers_refused", std::size_t{0});
  r.transcript = j.at("transcript").get<std::vector<Message>>();
  r.histories = j.value("histories", std::map<std::string, std::vector<ChatTurn>>{});
  r.routes = j.value("routes", std::map<std::string, RouteInfo>{});
  if (j.contains("env")) {
    for (const auto& [k, v] : j.at("env").items()) {
      r.env[k] = v.is_null() ? std::nullopt : std::optional<std::string>(v.get<std::string>());
    }
  }
  if (j.contains("failure") && !j.at("failure").is_null()) r.failure = j.at("failure").get<FailureInfo>();
}

}  // namespace gtt
