#include "gtt/arena/service.hpp"

#include <cstdio>
#include <fstream>

#include "gtt/common/util.hpp"
#include "gtt/protocol/answer.hpp"
#include "gtt/protocol/serialize.hpp"
#include "gtt/protocol/trial.hpp"

namespace gtt {

using json = nlohmann::json;

struct ArenaService::Session {
  std::mutex mu;
  std::string id;
  ArenaMode mode = ArenaMode::kHumanDistinguisher;
  std::string handle;
  std::string target;
  std::string actor;
  SecretIdentity secret = SecretIdentity::kTarget;
  std::uint64_t seed = 0;
  SessionState state = SessionState::kOpen;
  std::size_t budget = 40;
  std::size_t distinguisher_turns = 0;
  Timestamp created{};
  Timestamp expires{};

  TrialRecord record;
  /// The agent's side of the game.
  Conversation agent;
  std::string agent_name;
  std::shared_ptr<Agent> backend;
  std::optional<int> verdict;
};

namespace {

std::string hex_id(std::mt19937_64& rng) {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

ArenaError not_found(const std::string& id) { return {404, "not_found", "no session '" + id + "'"}; }

}  // namespace

CreateRequest create_request_from_json(const json& j) {
  if (!j.is_object()) throw ArenaError(400, "bad_request", "expected a JSON object");
  CreateRequest r;
  try {
    r.mode = arena_mode_from_string(j.value("mode", std::string("human_distinguisher")));
    r.target = j.at("target").get<std::string>();
    if (j.contains("actor") && !j.at("actor").is_null()) r.actor = j.at("actor").get<std::string>();
    r.handle = j.value("handle", std::string("anonymous"));
    if (j.contains("max_distinguisher_turns")) r.max_distinguisher_turns = j.at("max_distinguisher_turns");
  } catch (const json::exception& e) {
    throw ArenaError(400, "bad_request", e.what());
  }
  if (r.handle.empty()) r.handle = "anonymous";
  return r;
}

ArenaService::ArenaService(ArenaConfig config)
    : config_(std::move(config)),
      templates_(config_.templates ? *config_.templates : PromptTemplates::defaults()),
      rng_(config_.seed ? *config_.seed : std::random_device{}()) {
  if (!config_.roster) throw ConfigError("arena needs a model roster");
  if (config_.max_distinguisher_turns == 0) throw ConfigError("arena turn budget must be at least 1");
  if (config_.store && std::filesystem::exists(*config_.store)) board_ = Leaderboard::from_jsonl(*config_.store);
}

ArenaService::~ArenaService() = default;

Timestamp ArenaService::now() const { return config_.now ? config_.now() : Clock::now(); }

std::shared_ptr<ArenaService::Session> ArenaService::find(const std::string& id) {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw not_found(id);
  return it->second;
}

void ArenaService::touch(Session& s) { s.expires = now() + config_.ttl; }

void ArenaService::check_expiry(Session& s) {
  if (s.state == SessionState::kExpired) throw ArenaError(410, "expired", "session expired");
  if ((s.state == SessionState::kOpen || s.state == SessionState::kAwaitingHuman) && now() >= s.expires) {
    transition(s.state, SessionState::kExpired);
    throw ArenaError(410, "expired", "session expired");
  }
}

std::string ArenaService::agent_turn(Session& s) {
  AgentReply r = s.backend->next_turn(s.agent);
  s.agent.turns.push_back({ChatRole::kAssistant, r.content, r.content});
  s.record.routes[s.agent_name] = r.route;
  return std::move(r.content);
}

json ArenaService::create_session(const CreateRequest& req) {
  auto& roster = *config_.roster;
  if (!roster.contains(req.target)) throw ArenaError(400, "unknown_model", "unknown model '" + req.target + "'");

  auto s = std::make_shared<Session>();
  {
    std::lock_guard lock(mu_);
    s->id = hex_id(rng_);
    s->seed = rng_();
  }
  s->mode = req.mode;
  s->handle = req.handle;
  s->target = req.target;
  s->budget = req.max_distinguisher_turns.value_or(config_.max_distinguisher_turns);
  if (s->budget == 0) throw ArenaError(400, "bad_request", "turn budget must be at least 1");
  s->created = now();
  touch(*s);

  TrialConfig& cfg = s->record.config;
  cfg.variant.target = req.target;
  cfg.max_distinguisher_turns = s->budget;
  cfg.rng_seed = s->seed;
  cfg.trial_id = "arena__" + s->id;
  cfg.target_slug = roster.spec(req.target).slug();
  s->record.env = config_.env;
  const std::string slug = *cfg.target_slug;

  if (req.mode == ArenaMode::kHumanDistinguisher) {
    if (req.actor) {
      if (!roster.contains(*req.actor)) throw ArenaError(400, "unknown_model", "unknown model '" + *req.actor + "'");
      s->actor = *req.actor;
    } else {
      s->actor = req.target;
      for (const auto& id : roster.ids()) {
        if (id != req.target) {
          s->actor = id;
          break;
        }
      }
    }
    cfg.variant.actor = s->actor;
    s->secret = draw_secret(s->seed);
    const bool imitating = s->secret == SecretIdentity::kImitator;
    s->agent_name = imitating ? "actor" : "target";
    s->agent.role = imitating ? AgentRole::kActor : AgentRole::kTarget;
    s->agent.self_model = imitating ? s->actor : s->target;
    s->agent.target_model = s->target;
    s->agent.seed = combine_seed(s->seed, imitating ? 1 : 2);
    s->backend = roster.agent(s->agent.self_model);
  } else {
    s->actor = human_subject(req.handle);
    cfg.variant.actor = s->actor;
    s->secret = SecretIdentity::kImitator;
    s->agent_name = "distinguisher";
    s->agent.role = AgentRole::kDistinguisher;
    s->agent.self_model = s->target;
    s->agent.target_model = s->target;
    s->agent.seed = combine_seed(s->seed, 3);
    s->backend = roster.agent(s->target);
  }
  s->record.secret = s->secret;

  std::lock_guard session_lock(s->mu);
  if (req.mode == ArenaMode::kHumanActor) {
    s->record.distinguisher_prompt = render_prompt(PromptRole::kDistinguisher, cfg, {slug, {}, {}, {}}, templates_);
    s->agent.turns.push_back({ChatRole::kUser, s->record.distinguisher_prompt, std::nullopt});
    transition(s->state, SessionState::kAwaitingAgent);
    std::string opening;
    try {
      opening = agent_turn(*s);
    } catch (const BackendError& e) {
      throw ArenaError(502, "backend_error", e.what());
    }
    s->distinguisher_turns = 1;
    s->record.first_distinguisher_message = opening;
    s->record.raw_final_message = opening;
    s->record.transcript.push_back({Channel::kMain, Sender::kDistinguisher, 0, opening, now()});
    const ParsedAnswer parsed = parse_answer(opening, true);
    if (parsed.analyzable()) {
      s->record.parsed = parsed;
      transition(s->state, SessionState::kVerdictSubmitted);
      finish(*s);
    } else {
      transition(s->state, SessionState::kAwaitingHuman);
    }
  }
  {
    std::lock_guard lock(mu_);
    sessions_[s->id] = s;
  }
  return view(*s);
}

json ArenaService::get_session(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (s->state != SessionState::kRevealed) {
    try {
      check_expiry(*s);
    } catch (const ArenaError&) {
    }
  }
  return view(*s);
}

json ArenaService::post_message(const std::string& id, const std::string& text) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  check_expiry(*s);
  if (s->state != SessionState::kOpen && s->state != SessionState::kAwaitingHuman) {
    throw ArenaError(409, "conflict", "session is " + std::string(to_string(s->state)));
  }
  if (trim(text).empty()) throw ArenaError(400, "bad_request", "empty message");

  const bool human_judges = s->mode == ArenaMode::kHumanDistinguisher;
  if (human_judges && s->distinguisher_turns >= s->budget) {
    throw ArenaError(409, "budget_exhausted",
                     "all " + std::to_string(s->budget) + " distinguisher turns used; submit a verdict");
  }

  const SessionState before = s->state;
  const std::size_t turns_before = s->agent.turns.size();
  const std::size_t transcript_before = s->record.transcript.size();
  const TurnCounts counts_before = s->record.turns;
  const std::size_t dturns_before = s->distinguisher_turns;

  transition(s->state, SessionState::kAwaitingAgent);
  const Sender human_sender = Sender::kHuman;
  s->record.transcript.push_back({Channel::kMain, human_sender, s->record.transcript.size(), text, now()});

  if (human_judges) {
    s->distinguisher_turns += 1;
    s->record.turns.distinguisher = s->distinguisher_turns;
    if (s->distinguisher_turns == 1) {
      s->record.first_distinguisher_message = text;
      if (s->secret == SecretIdentity::kImitator) {
        const PromptParams params{*s->record.config.target_slug, text, std::nullopt, std::nullopt};
        s->record.actor_prompt = render_prompt(PromptRole::kActor, s->record.config, params, templates_);
        s->agent.turns.push_back({ChatRole::kUser, s->record.actor_prompt, text});
      } else {
        s->agent.turns.push_back({ChatRole::kUser, text, text});
      }
    } else {
      s->agent.turns.push_back({ChatRole::kUser, text, text});
    }
  } else {
    s->agent.turns.push_back({ChatRole::kUser, text, text});
    s->record.turns.interlocutor += 1;
  }

  std::string reply;
  try {
    reply = agent_turn(*s);
  } catch (const BackendError& e) {
    s->agent.turns.resize(turns_before);
    s->record.transcript.resize(transcript_before);
    s->record.turns = counts_before;
    s->distinguisher_turns = dturns_before;
    transition(s->state, before == SessionState::kOpen ? SessionState::kOpen : SessionState::kAwaitingHuman);
    throw ArenaError(502, "backend_error", e.what());
  }

  const Sender agent_sender = human_judges
                                  ? (s->secret == SecretIdentity::kImitator ? Sender::kActor : Sender::kTarget)
                                  : Sender::kDistinguisher;
  s->record.transcript.push_back({Channel::kMain, agent_sender, s->record.transcript.size(), reply, now()});
  touch(*s);

  if (human_judges) {
    s->record.turns.interlocutor += 1;
    transition(s->state, SessionState::kAwaitingHuman);
    return {{"reply", reply}, {"session", view(*s)}};
  }

  s->distinguisher_turns += 1;
  s->record.turns.distinguisher = s->distinguisher_turns;
  s->record.raw_final_message = reply;
  const ParsedAnswer parsed = parse_answer(reply, false);
  if (parsed.analyzable() || s->distinguisher_turns >= s->budget) {
    s->record.parsed = parsed.analyzable() ? parsed : ParsedAnswer::unparseable();
    transition(s->state, SessionState::kVerdictSubmitted);
    finish(*s);
  } else {
    transition(s->state, SessionState::kAwaitingHuman);
  }
  return {{"reply", reply}, {"session", view(*s)}};
}

json ArenaService::submit_verdict(const std::string& id, int bit) {
  if (bit != 0 && bit != 1) throw ArenaError(400, "bad_request", "verdict must be 0 or 1");
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (s->state == SessionState::kRevealed || s->state == SessionState::kVerdictSubmitted) {
    throw ArenaError(409, "conflict", "verdict already submitted");
  }
  check_expiry(*s);
  if (s->mode != ArenaMode::kHumanDistinguisher) {
    throw ArenaError(409, "conflict", "the model gives the verdict in human_actor games");
  }
  if (s->state != SessionState::kAwaitingHuman) {
    throw ArenaError(409, "conflict", "session is " + std::string(to_string(s->state)));
  }
  transition(s->state, SessionState::kVerdictSubmitted);
  s->verdict = bit;
  s->record.parsed = bit == 1 ? ParsedAnswer::same() : ParsedAnswer::different();
  finish(*s);
  return view(*s);
}

void ArenaService::finish(Session& s) {
  s.record.success = distinguisher_success(s.record.parsed, s.secret);
  s.record.histories[s.agent_name] = s.agent.turns;

  ArenaOutcome outcome{s.mode, s.handle, s.actor, s.target, s.secret, s.record.success};
  json line = s.record;
  line["arena"] = {{"session_id", s.id},
                   {"mode", to_string(s.mode)},
                   {"handle", s.handle},
                   {"actor_model", s.actor},
                   {"created", format_utc(s.created)}};
  {
    std::lock_guard lock(board_mu_);
    if (config_.store) {
      std::ofstream out(*config_.store, std::ios::app);
      if (!out) throw ArenaError(500, "store_error", "cannot append to " + config_.store->string());
      out << line.dump() << '\n';
      out.flush();
    }
    board_.apply(outcome);
  }
  transition(s.state, SessionState::kRevealed);
}

json ArenaService::view(const Session& s) const {
  json transcript = json::array();
  const bool revealed = s.state == SessionState::kRevealed;
  for (const auto& m : s.record.transcript) {
    const bool human = m.sender == Sender::kHuman;
    json entry = {{"index", m.index}, {"from", human ? "human" : "agent"}, {"content", m.content}};
    if (revealed) entry["sender"] = to_string(m.sender);
    transcript.push_back(std::move(entry));
  }
  const bool human_judges = s.mode == ArenaMode::kHumanDistinguisher;
  const std::size_t remaining = s.budget > s.distinguisher_turns ? s.budget - s.distinguisher_turns : 0;
  json out = {{"session_id", s.id},
              {"mode", to_string(s.mode)},
              {"target", s.target},
              {"handle", s.handle},
              {"state", to_string(s.state)},
              {"turn_budget", s.budget},
              {"distinguisher_turns", s.distinguisher_turns},
              {"turns_remaining", remaining},
              {"can_send", (s.state == SessionState::kOpen || s.state == SessionState::kAwaitingHuman) &&
                               (!human_judges || remaining > 0)},
              {"can_submit_verdict", human_judges && s.state == SessionState::kAwaitingHuman},
              {"transcript", std::move(transcript)},
              {"created", format_utc(s.created)},
              {"expires", format_utc(s.expires)}};
  if (revealed) {
    json reveal = {{"secret", to_string(s.secret)},
                   {"success", s.record.success ? json(*s.record.success) : json(nullptr)},
                   {"verdict", s.record.parsed.bit ? json(*s.record.parsed.bit) : json(nullptr)},
                   {"actor", s.actor}};
    if (human_judges && s.record.success) reveal["human_correct"] = *s.record.success;
    if (!human_judges && s.record.success) reveal["human_fooled_model"] = !*s.record.success;
    out["reveal"] = std::move(reveal);
  }
  return out;
}

json ArenaService::leaderboard() const { return {{"entries", board_entries()}}; }

std::vector<LeaderboardEntry> ArenaService::board_entries() const {
  std::lock_guard lock(board_mu_);
  return board_.entries();
}

json ArenaService::models() const {
  json out = json::array();
  for (const auto& id : config_.roster->ids()) {
    out.push_back({{"id", id}, {"kind", to_string(config_.roster->spec(id).kind)}});
  }
  return {{"models", std::move(out)}};
}

std::size_t ArenaService::expire_idle() {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, s] : sessions_) all.push_back(s);
  }
  std::size_t changed = 0;
  for (const auto& s : all) {
    std::lock_guard lock(s->mu);
    if ((s->state == SessionState::kOpen || s->state == SessionState::kAwaitingHuman) && now() >= s->expires) {
      transition(s->state, SessionState::kExpired);
      ++changed;
    }
  }
  return changed;
}

}  // namespace gtt
