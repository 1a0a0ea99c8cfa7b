#include "gtt/protocol/trial.hpp"

#include <random>

#include "gtt/protocol/answer.hpp"

namespace gtt {
namespace {

enum InstanceId : std::uint64_t {
  kActorInstance = 1,
  kTargetInstance = 2,
  kDistinguisherInstance = 3,
  kSpecimenInstance = 4,
  kDistinguisherSpecimenInstance = 5,
};

struct InstanceFailure {
  std::string role;
  BackendError error;
};

class Instance {
 public:
  Instance(std::string name, std::shared_ptr<Agent> agent, AgentRole role, std::string self_model,
           std::string target_model, std::uint64_t seed)
      : name_(std::move(name)), agent_(std::move(agent)) {
    conv_.role = role;
    conv_.self_model = std::move(self_model);
    conv_.target_model = std::move(target_model);
    conv_.seed = seed;
  }

  const std::string& name() const { return name_; }
  bool used() const { return !conv_.turns.empty(); }
  const std::vector<ChatTurn>& turns() const { return conv_.turns; }
  const std::optional<RouteInfo>& route() const { return route_; }

  void instruct(std::string text) { conv_.turns.push_back({ChatRole::kUser, std::move(text), std::nullopt}); }
  void instruct(std::string text, std::string dialogue) {
    conv_.turns.push_back({ChatRole::kUser, std::move(text), std::move(dialogue)});
  }
  void relay(const std::string& message) { conv_.turns.push_back({ChatRole::kUser, message, message}); }

  std::string reply() {
    try {
      AgentReply r = agent_->next_turn(conv_);
      route_ = std::move(r.route);
      conv_.turns.push_back({ChatRole::kAssistant, r.content, r.content});
      return std::move(r.content);
    } catch (const BackendError& e) {
      throw InstanceFailure{name_, e};
    }
  }

 private:
  std::string name_;
  std::shared_ptr<Agent> agent_;
  Conversation conv_;
  std::optional<RouteInfo> route_;
};

class TrialRun {
 public:
  TrialRun(const TrialConfig& config, const TrialAgents& agents, const TrialOptions& options)
      : config_(config),
        templates_(options.templates ? *options.templates : PromptTemplates::defaults()),
        now_(options.now ? options.now : [] { return Clock::now(); }),
        actor_("actor", agents.actor, AgentRole::kActor, config.variant.actor, config.variant.target,
               combine_seed(config.rng_seed, kActorInstance)),
        target_("target", agents.target, AgentRole::kTarget, config.variant.target, config.variant.target,
                combine_seed(config.rng_seed, kTargetInstance)),
        distinguisher_("distinguisher",
                       config.variant.fixed_distinguisher ? agents.fixed_distinguisher : agents.target,
                       AgentRole::kDistinguisher, config.variant.distinguisher_model(), config.variant.target,
                       combine_seed(config.rng_seed, kDistinguisherInstance)),
        specimen_("specimen", agents.target, AgentRole::kSpecimen, config.variant.target, config.variant.target,
                  combine_seed(config.rng_seed, kSpecimenInstance)),
        distinguisher_specimen_("distinguisher_specimen", agents.target, AgentRole::kSpecimen,
                                config.variant.target, config.variant.target,
                                combine_seed(config.rng_seed, kDistinguisherSpecimenInstance)) {}

  TrialRecord run() {
    record_.config = config_;
    record_.secret = config_.forced_secret ? *config_.forced_secret : draw_secret(config_.rng_seed);
    try {
      play();
    } catch (const InstanceFailure& f) {
      record_.failure = FailureInfo{"backend", f.role, f.error.what(), f.error.attempt_log()};
      record_.parsed = ParsedAnswer::unparseable();
      record_.success.reset();
    }
    for (const Instance* inst : {&actor_, &target_, &distinguisher_, &specimen_, &distinguisher_specimen_}) {
      if (!inst->used()) continue;
      record_.histories[inst->name()] = inst->turns();
      if (inst->route()) record_.routes[inst->name()] = *inst->route();
    }
    return std::move(record_);
  }

 private:
  std::string slug() const { return config_.target_slug.value_or(config_.variant.target); }
  bool imitator() const { return record_.secret == SecretIdentity::kImitator; }

  void log(Channel channel, Sender sender, const std::string& content) {
    record_.transcript.push_back({channel, sender, record_.transcript.size(), content, now_()});
  }

  // Query stage shared by the actor and the GDGTT distinguisher. `asker`
  // already holds its stage instruction.
  void query_stage(Instance& asker, Instance& specimen, Channel channel, Sender asker_sender, std::size_t cap,
                   bool honour_stop, std::size_t& queries, std::size_t& replies) {
    while (replies < cap) {
      const std::string query = asker.reply();
      ++queries;
      log(channel, asker_sender, query);
      if (honour_stop && is_stop_message(query)) return;
      specimen.relay(query);
      const std::string answer = specimen.reply();
      ++replies;
      log(channel, Sender::kSpecimen, answer);
      asker.relay(answer);
    }
  }

  void actor_stage() {
    const PromptParams params{slug(), std::nullopt, std::nullopt, std::nullopt};
    record_.actor_prompt = render_prompt(PromptRole::kActor, config_, params, templates_);
    actor_.instruct(record_.actor_prompt);
    query_stage(actor_, specimen_, Channel::kSpecimen, Sender::kActor, config_.specimen_turn_cap(),
                !config_.controlled_query_budget.has_value(), record_.turns.specimen_queries,
                record_.turns.specimen_replies);
  }

  void distinguisher_stage() {
    const PromptParams params{slug(), std::nullopt, std::nullopt, std::nullopt};
    distinguisher_.instruct(render_prompt(PromptRole::kDistinguisherQuery, config_, params, templates_));
    query_stage(distinguisher_, distinguisher_specimen_, Channel::kDistinguisherSpecimen, Sender::kDistinguisher,
                config_.max_specimen_turns, true, record_.turns.distinguisher_specimen_queries,
                record_.turns.distinguisher_specimen_replies);
  }

  // Hands the first distinguisher message to whoever answers it.
  void open_interlocutor(const std::string& m1) {
    if (!imitator()) {
      target_.relay(m1);
      return;
    }
    const PromptParams params{slug(), m1, std::nullopt, std::nullopt};
    if (!config_.variant.actor_query_phase) {
      record_.actor_prompt = render_prompt(PromptRole::kActor, config_, params, templates_);
      actor_.instruct(record_.actor_prompt, m1);
    } else if (select_template(PromptRole::kActorMainPhase, config_)) {
      actor_.instruct(render_prompt(PromptRole::kActorMainPhase, config_, params, templates_), m1);
    } else {
      actor_.relay(m1);
    }
  }

  void play() {
    if (imitator() && config_.variant.actor_query_phase) actor_stage();
    if (config_.variant.distinguisher_query_phase) distinguisher_stage();

    const PromptParams params{slug(), std::nullopt, std::nullopt, std::nullopt};
    record_.distinguisher_prompt = render_prompt(PromptRole::kDistinguisher, config_, params, templates_);
    distinguisher_.instruct(record_.distinguisher_prompt);

    Instance& interlocutor = imitator() ? actor_ : target_;
    const Sender interlocutor_sender = imitator() ? Sender::kActor : Sender::kTarget;
    const std::size_t cap = config_.distinguisher_turn_cap();
    const std::size_t refuse_through = config_.controlled_turn_budget.value_or(0);

    for (std::size_t k = 1;; ++k) {
      const std::string message = distinguisher_.reply();
      record_.turns.distinguisher = k;
      log(Channel::kMain, Sender::kDistinguisher, message);
      record_.raw_final_message = message;
      if (k == 1) record_.first_distinguisher_message = message;

      const ParsedAnswer parsed = parse_answer(message, k == 1 && refuse_through == 0);
      if (parsed.analyzable()) {
        if (k <= refuse_through) {
          ++record_.early_answers_refused;
        } else {
          record_.parsed = parsed;
          record_.success = distinguisher_success(parsed, record_.secret);
          return;
        }
      }
      if (k >= cap) {
        record_.parsed = ParsedAnswer::unparseable();
        return;
      }

      if (k == 1) {
        open_interlocutor(message);
      } else {
        interlocutor.relay(message);
      }
      const std::string answer = interlocutor.reply();
      ++record_.turns.interlocutor;
      log(Channel::kMain, interlocutor_sender, answer);
      distinguisher_.relay(answer);
    }
  }

  const TrialConfig& config_;
  const PromptTemplates& templates_;
  std::function<Timestamp()> now_;
  Instance actor_;
  Instance target_;
  Instance distinguisher_;
  Instance specimen_;
  Instance distinguisher_specimen_;
  TrialRecord record_;
};

}  // namespace

SecretIdentity draw_secret(std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return (rng() >> 63) ? SecretIdentity::kImitator : SecretIdentity::kTarget;
}

TrialRecord run_trial(const TrialConfig& config, const TrialAgents& agents, const TrialOptions& options) {
  config.validate();
  if (!agents.actor || !agents.target) throw ConfigError("run_trial needs actor and target agents");
  if (config.variant.fixed_distinguisher && !agents.fixed_distinguisher) {
    throw ConfigError("variant names a fixed distinguisher but no agent was supplied");
  }
  return TrialRun(config, agents, options).run();
}

}  // namespace gtt
