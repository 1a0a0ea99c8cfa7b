#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gtt/common/util.hpp"

namespace gtt {

/// Which agent the distinguisher is actually talking to in a trial.
enum class SecretIdentity { kTarget, kImitator };

enum class Channel { kSpecimen, kDistinguisherSpecimen, kMain };

enum class Sender { kActor, kTarget, kDistinguisher, kSpecimen, kHuman };

/// Role an agent instance plays inside one trial. Backends receive it so
/// that role-conditioned agents (tabular tables, scripts) can select their
/// behaviour; remote models never see it.
enum class AgentRole { kActor, kTarget, kDistinguisher, kSpecimen };

std::string_view to_string(SecretIdentity s);
std::string_view to_string(Channel c);
std::string_view to_string(Sender s);
std::string_view to_string(AgentRole r);
SecretIdentity secret_from_string(std::string_view s);
Channel channel_from_string(std::string_view s);
Sender sender_from_string(std::string_view s);

/// One game's roles. Models are referred to by id; without a fixed
/// distinguisher the target judges its own imitation.
struct ProtocolVariant {
  std::string actor;
  std::string target;
  std::optional<std::string> fixed_distinguisher;
  bool actor_query_phase = false;
  bool distinguisher_query_phase = false;

  const std::string& distinguisher_model() const {
    return fixed_distinguisher ? *fixed_distinguisher : target;
  }
  /// "gtt", "gttq", "fdgtt", "fdgttq", with a "+dq" suffix when the
  /// distinguisher has a query phase.
  std::string family() const;
  bool operator==(const ProtocolVariant&) const = default;
};

struct TrialConfig {
  ProtocolVariant variant;
  std::size_t max_distinguisher_turns = 40;
  std::size_t max_specimen_turns = 20;
  std::optional<std::size_t> controlled_turn_budget;
  std::optional<std::size_t> controlled_query_budget;
  std::uint64_t rng_seed = 0;
  std::string trial_id;
  /// Rendered into {target model slug}; the target id when unset.
  std::optional<std::string> target_slug;
  /// Set by the campaign runner for stratified branch assignment. When
  /// empty the secret is a fair coin drawn from rng_seed.
  std::optional<SecretIdentity> forced_secret;

  /// Throws ConfigError on zero budgets or unsupported combinations.
  void validate() const;

  /// Controlled-turn runs allow n question rounds plus the verdict message.
  std::size_t distinguisher_turn_cap() const {
    return controlled_turn_budget ? *controlled_turn_budget + 1 : max_distinguisher_turns;
  }
  std::size_t specimen_turn_cap() const {
    return controlled_query_budget ? *controlled_query_budget : max_specimen_turns;
  }
  bool operator==(const TrialConfig&) const = default;
};

struct Message {
  Channel channel = Channel::kMain;
  Sender sender = Sender::kDistinguisher;
  std::size_t index = 0;
  std::string content;
  Timestamp timestamp{};
};

struct ParsedAnswer {
  enum class Kind { kSame, kDifferent, kOpening, kUnparseable };

  Kind kind = Kind::kUnparseable;
  std::optional<int> bit;

  static ParsedAnswer same() { return {Kind::kSame, 1}; }
  static ParsedAnswer different() { return {Kind::kDifferent, 0}; }
  static ParsedAnswer opening(int b) { return {Kind::kOpening, b}; }
  static ParsedAnswer unparseable() { return {Kind::kUnparseable, std::nullopt}; }

  bool analyzable() const { return kind != Kind::kUnparseable; }
  bool operator==(const ParsedAnswer&) const = default;
};

std::string_view to_string(ParsedAnswer::Kind k);
ParsedAnswer::Kind answer_kind_from_string(std::string_view s);

/// Success of the distinguisher: verdict 1 against the target, verdict 0
/// against the imitator. Empty when the verdict did not parse.
std::optional<bool> distinguisher_success(const ParsedAnswer& parsed, SecretIdentity secret);

enum class ChatRole { kUser, kAssistant };

/// One entry of an agent's own conversation history. Instructions and
/// relayed messages are both user turns; `dialogue` holds the conversational
/// payload (absent for a bare instruction, the embedded first message for an
/// actor prompt).
struct ChatTurn {
  ChatRole role = ChatRole::kUser;
  std::string content;
  std::optional<std::string> dialogue;
  bool operator==(const ChatTurn&) const = default;
};

/// Everything a backend needs to produce the next message of one instance.
struct Conversation {
  AgentRole role = AgentRole::kActor;
  std::string self_model;
  std::string target_model;
  std::vector<ChatTurn> turns;
  /// Instance seed; identical across calls of the same instance.
  std::uint64_t seed = 0;

  std::size_t own_turns() const;
  /// Conversational payloads in order, instructions removed.
  std::vector<std::string> dialogue() const;
};

struct RouteInfo {
  std::string backend;
  std::string provider;
  std::string display_name;
  std::string model_id;
  bool operator==(const RouteInfo&) const = default;
};

struct FailureInfo {
  std::string kind;
  std::string role;
  std::string message;
  std::vector<std::string> attempt_log;
  bool operator==(const FailureInfo&) const = default;
};

struct TurnCounts {
  std::size_t distinguisher = 0;
  std::size_t interlocutor = 0;
  std::size_t specimen_queries = 0;
  std::size_t specimen_replies = 0;
  std::size_t distinguisher_specimen_queries = 0;
  std::size_t distinguisher_specimen_replies = 0;
  bool operator==(const TurnCounts&) const = default;
};

struct TrialRecord {
  TrialConfig config;
  SecretIdentity secret = SecretIdentity::kTarget;
  std::vector<Message> transcript;
  /// Keyed by instance: "actor", "target", "distinguisher", "specimen",
  /// "distinguisher_specimen". Only instances that took part are present.
  std::map<std::string, std::vector<ChatTurn>> histories;
  std::string actor_prompt;
  std::string distinguisher_prompt;
  std::string first_distinguisher_message;
  std::string raw_final_message;
  ParsedAnswer parsed;
  std::optional<bool> success;
  TurnCounts turns;
  /// Early verdicts ignored under a controlled-turn budget.
  std::size_t early_answers_refused = 0;
  std::map<std::string, RouteInfo> routes;
  std::map<std::string, std::optional<std::string>> env;
  std::optional<FailureInfo> failure;

  bool failed() const { return failure.has_value(); }
};

/// Equality of everything except message timestamps and the env block.
bool same_outcome(const TrialRecord& a, const TrialRecord& b);

}  // namespace gtt
