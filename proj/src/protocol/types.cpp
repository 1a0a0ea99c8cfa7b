#include "gtt/protocol/types.hpp"

#include <string>

#include "gtt/common/errors.hpp"

namespace gtt {

std::string_view to_string(SecretIdentity s) {
  return s == SecretIdentity::kTarget ? "target" : "imitator";
}

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::kSpecimen:
      return "specimen";
    case Channel::kDistinguisherSpecimen:
      return "distinguisher_specimen";
    case Channel::kMain:
      return "main";
  }
  return "main";
}

std::string_view to_string(Sender s) {
  switch (s) {
    case Sender::kActor:
      return "actor";
    case Sender::kTarget:
      return "target";
    case Sender::kDistinguisher:
      return "distinguisher";
    case Sender::kSpecimen:
      return "specimen";
    case Sender::kHuman:
      return "human";
  }
  return "actor";
}

std::string_view to_string(AgentRole r) {
  switch (r) {
    case AgentRole::kActor:
      return "actor";
    case AgentRole::kTarget:
      return "target";
    case AgentRole::kDistinguisher:
      return "distinguisher";
    case AgentRole::kSpecimen:
      return "specimen";
  }
  return "actor";
}

SecretIdentity secret_from_string(std::string_view s) {
  if (s == "target") return SecretIdentity::kTarget;
  if (s == "imitator") return SecretIdentity::kImitator;
  throw DomainError("unknown secret identity: " + std::string(s));
}

Channel channel_from_string(std::string_view s) {
  if (s == "specimen") return Channel::kSpecimen;
  if (s == "distinguisher_specimen") return Channel::kDistinguisherSpecimen;
  if (s == "main") return Channel::kMain;
  throw DomainError("unknown channel: " + std::string(s));
}

Sender sender_from_string(std::string_view s) {
  if (s == "actor") return Sender::kActor;
  if (s == "target") return Sender::kTarget;
  if (s == "distinguisher") return Sender::kDistinguisher;
  if (s == "specimen") return Sender::kSpecimen;
  if (s == "human") return Sender::kHuman;
  throw DomainError("unknown sender: " + std::string(s));
}

std::string_view to_string(ParsedAnswer::Kind k) {
  switch (k) {
    case ParsedAnswer::Kind::kSame:
      return "same";
    case ParsedAnswer::Kind::kDifferent:
      return "different";
    case ParsedAnswer::Kind::kOpening:
      return "opening_answer";
    case ParsedAnswer::Kind::kUnparseable:
      return "unparseable";
  }
  return "unparseable";
}

ParsedAnswer::Kind answer_kind_from_string(std::string_view s) {
  if (s == "same") return ParsedAnswer::Kind::kSame;
  if (s == "different") return ParsedAnswer::Kind::kDifferent;
  if (s == "opening_answer") return ParsedAnswer::Kind::kOpening;
  if (s == "unparseable") return ParsedAnswer::Kind::kUnparseable;
  throw DomainError("unknown answer kind: " + std::string(s));
}

std::string ProtocolVariant::family() const {
  std::string name = fixed_distinguisher ? "fdgtt" : "gtt";
  if (actor_query_phase) name += "q";
  if (distinguisher_query_phase) name += "+dq";
  return name;
}

void TrialConfig::validate() const {
  if (variant.actor.empty() || variant.target.empty()) {
    throw ConfigError("trial needs both an actor and a target model");
  }
  if (max_distinguisher_turns < 1) throw ConfigError("max_distinguisher_turns must be >= 1");
  if (max_specimen_turns < 1) throw ConfigError("max_specimen_turns must be >= 1");
  if (controlled_turn_budget && *controlled_turn_budget < 1) {
    throw ConfigError("controlled_turn_budget must be >= 1");
  }
  if (controlled_query_budget && *controlled_query_budget < 1) {
    throw ConfigError("controlled_query_budget must be >= 1");
  }
  if (controlled_query_budget && !variant.actor_query_phase) {
    throw ConfigError("controlled_query_budget requires the actor query phase");
  }
  if (controlled_turn_budget && variant.fixed_distinguisher) {
    throw ConfigError("controlled_turn_budget has no fixed-distinguisher prompt");
  }
}

std::optional<bool> distinguisher_success(const ParsedAnswer& parsed, SecretIdentity secret) {
  if (!parsed.analyzable() || !parsed.bit) {
    return std::nullopt;
  }
  const int expected = secret == SecretIdentity::kTarget ? 1 : 0;
  return *parsed.bit == expected;
}

std::size_t Conversation::own_turns() const {
  std::size_t n = 0;
  for (const auto& t : turns) {
    if (t.role == ChatRole::kAssistant) ++n;
  }
  return n;
}

std::vector<std::string> Conversation::dialogue() const {
  std::vector<std::string> out;
  out.reserve(turns.size());
  for (const auto& t : turns) {
    if (t.dialogue) out.push_back(*t.dialogue);
  }
  return out;
}

bool same_outcome(const TrialRecord& a, const TrialRecord& b) {
  if (a.transcript.size() != b.transcript.size()) return false;
  for (std::size_t i = 0; i < a.transcript.size(); ++i) {
    const auto& x = a.transcript[i];
    const auto& y = b.transcript[i];
    if (x.channel != y.channel || x.sender != y.sender || x.index != y.index || x.content != y.content) {
      return false;
    }
  }
  return a.config == b.config && a.secret == b.secret && a.histories == b.histories &&
         a.actor_prompt == b.actor_prompt && a.distinguisher_prompt == b.distinguisher_prompt &&
         a.first_distinguisher_message == b.first_distinguisher_message &&
         a.raw_final_message == b.raw_final_message && a.parsed == b.parsed && a.success == b.success &&
         a.turns == b.turns && a.early_answers_refused == b.early_answers_refused && a.routes == b.routes &&
         a.failure == b.failure;
}

}  // namespace gtt
