#include <gtest/gtest.h>

#include <random>

#include <nlohmann/json.hpp>

#include "gtt/protocol/answer.hpp"
#include "gtt/protocol/serialize.hpp"
#include "gtt/protocol/trial.hpp"
#include "gtt/tabular/agent.hpp"
#include "gtt/theory/builders.hpp"
#include "support/support.hpp"

namespace gtt {
namespace {

using testing::ListAgent;

std::shared_ptr<Agent> list(std::vector<std::string> replies) {
  return std::make_shared<ListAgent>(std::move(replies));
}

TrialConfig base_config(SecretIdentity secret) {
  TrialConfig c;
  c.variant = {"a", "b"};
  c.max_distinguisher_turns = 10;
  c.rng_seed = 99;
  c.trial_id = "t";
  c.forced_secret = secret;
  return c;
}

TEST(ParseAnswer, Examples) {
  EXPECT_EQ(parse_answer("I believe <answer>1</answer>", false), ParsedAnswer::same());
  EXPECT_EQ(parse_answer("no tag here", false), ParsedAnswer::unparseable());
  EXPECT_EQ(parse_answer("<answer>0</answer>", true), ParsedAnswer::opening(0));
}

TEST(ParseAnswer, LastWellFormedTagWins) {
  EXPECT_EQ(parse_answer("<answer>1</answer> on reflection <answer>0</answer>", false), ParsedAnswer::different());
  EXPECT_EQ(parse_answer("<answer>0</answer> <answer>2</answer>", false), ParsedAnswer::different());
  EXPECT_EQ(parse_answer("<answer> 1 </answer>", false), ParsedAnswer::same());
  EXPECT_EQ(parse_answer("<answer>yes</answer>", false), ParsedAnswer::unparseable());
  EXPECT_EQ(parse_answer("<answer>1", false), ParsedAnswer::unparseable());
  EXPECT_EQ(parse_answer("", true), ParsedAnswer::unparseable());
}

TEST(ParseAnswer, StopIsExactAfterTrim) {
  EXPECT_TRUE(is_stop_message("STOP"));
  EXPECT_TRUE(is_stop_message("  STOP\n"));
  EXPECT_FALSE(is_stop_message("stop"));
  EXPECT_FALSE(is_stop_message("STOP now"));
}

TEST(Success, FollowsVerdictAndSecret) {
  EXPECT_EQ(distinguisher_success(ParsedAnswer::same(), SecretIdentity::kTarget), true);
  EXPECT_EQ(distinguisher_success(ParsedAnswer::different(), SecretIdentity::kTarget), false);
  EXPECT_EQ(distinguisher_success(ParsedAnswer::different(), SecretIdentity::kImitator), true);
  EXPECT_EQ(distinguisher_success(ParsedAnswer::same(), SecretIdentity::kImitator), false);
  EXPECT_EQ(distinguisher_success(ParsedAnswer::opening(0), SecretIdentity::kImitator), true);
  EXPECT_EQ(distinguisher_success(ParsedAnswer::unparseable(), SecretIdentity::kTarget), std::nullopt);
}

TEST(Variant, FamilyNames) {
  ProtocolVariant v{"a", "b"};
  EXPECT_EQ(v.family(), "gtt");
  v.actor_query_phase = true;
  EXPECT_EQ(v.family(), "gttq");
  v.fixed_distinguisher = "d";
  EXPECT_EQ(v.family(), "fdgttq");
  v.distinguisher_query_phase = true;
  EXPECT_EQ(v.family(), "fdgttq+dq");
  EXPECT_EQ(v.distinguisher_model(), "d");
}

TEST(RunTrial, AnswerOnSecondTurnAgainstTarget) {
  const auto b = list({"Hello, who are you?", "<answer>1</answer>"});
  const TrialRecord r = run_trial(base_config(SecretIdentity::kTarget), {list({"x"}), b, nullptr});
  ASSERT_FALSE(r.failed());
  EXPECT_EQ(r.success, true);
  EXPECT_EQ(r.turns.distinguisher, 2u);
  EXPECT_EQ(r.turns.interlocutor, 1u);
  EXPECT_EQ(r.parsed, ParsedAnswer::same());
  EXPECT_EQ(r.first_distinguisher_message, "Hello, who are you?");
  EXPECT_EQ(r.raw_final_message, "<answer>1</answer>");
  EXPECT_EQ(r.histories.count("actor"), 0u);
}

TEST(RunTrial, GttqActorStopsImmediately) {
  TrialConfig c = base_config(SecretIdentity::kImitator);
  c.variant.actor_query_phase = true;
  const auto actor = list({"STOP", "I am b."});
  const auto target = list({"Question?", "<answer>0</answer>"});
  const TrialRecord r = run_trial(c, {actor, target, nullptr});
  std::size_t actor_msgs = 0, specimen_msgs = 0;
  for (const auto& m : r.transcript) {
    if (m.channel != Channel::kSpecimen) continue;
    (m.sender == Sender::kActor ? actor_msgs : specimen_msgs) += 1;
  }
  EXPECT_EQ(actor_msgs, 1u);
  EXPECT_EQ(specimen_msgs, 0u);
  EXPECT_EQ(r.turns.specimen_queries, 1u);
  EXPECT_EQ(r.turns.specimen_replies, 0u);
  EXPECT_EQ(r.success, true);
}

TEST(RunTrial, ControlledTurnsRefuseEarlyVerdicts) {
  TrialConfig c = base_config(SecretIdentity::kTarget);
  c.controlled_turn_budget = 3;
  const auto b = list({"<answer>1</answer>"});
  const TrialRecord r = run_trial(c, {list({"x"}), b, nullptr});
  EXPECT_EQ(r.early_answers_refused, 3u);
  EXPECT_EQ(r.turns.distinguisher, 4u);
  EXPECT_EQ(r.turns.interlocutor, 3u);
  EXPECT_EQ(r.parsed, ParsedAnswer::same());
  EXPECT_NE(r.distinguisher_prompt.find("exactly 3 rounds"), std::string::npos);
}

TEST(RunTrial, OpeningAnswerIsScoredByBit) {
  const TrialRecord r = run_trial(base_config(SecretIdentity::kImitator), {list({"x"}), list({"<answer>0</answer>"}), nullptr});
  EXPECT_EQ(r.parsed, ParsedAnswer::opening(0));
  EXPECT_EQ(r.success, true);
  EXPECT_EQ(r.turns.distinguisher, 1u);
}

TEST(RunTrial, BudgetExhaustionKeepsUnparseableRecord) {
  TrialConfig c = base_config(SecretIdentity::kTarget);
  c.max_distinguisher_turns = 3;
  const TrialRecord r = run_trial(c, {list({"x"}), list({"Still thinking."}), nullptr});
  EXPECT_FALSE(r.failed());
  EXPECT_EQ(r.parsed, ParsedAnswer::unparseable());
  EXPECT_EQ(r.success, std::nullopt);
  EXPECT_EQ(r.turns.distinguisher, 3u);
}

class Broken : public Agent {
 public:
  AgentReply next_turn(const Conversation&) override {
    throw BackendError("gateway down", {"attempt 1: HTTP 503", "attempt 2: HTTP 503"}, true);
  }
};

TEST(RunTrial, BackendFailureIsRecorded) {
  const TrialRecord r =
      run_trial(base_config(SecretIdentity::kImitator), {std::make_shared<Broken>(), list({"Hi?"}), nullptr});
  ASSERT_TRUE(r.failed());
  EXPECT_EQ(r.failure->kind, "backend");
  EXPECT_EQ(r.failure->role, "actor");
  EXPECT_EQ(r.failure->attempt_log.size(), 2u);
  EXPECT_EQ(r.success, std::nullopt);
}

TEST(RunTrial, FixedDistinguisherJudgesNominatedTarget) {
  TrialConfig c = base_config(SecretIdentity::kImitator);
  c.variant.fixed_distinguisher = "d";
  const auto d = list({"Are you b?", "<answer>0</answer>"});
  const TrialRecord r = run_trial(c, {list({"Yes, I am b."}), list({"unused"}), d});
  EXPECT_EQ(r.success, true);
  EXPECT_NE(r.distinguisher_prompt.find("is of the model type b"), std::string::npos);
  EXPECT_NE(r.actor_prompt.find("You must act as b"), std::string::npos);
  EXPECT_THROW(run_trial(c, {list({"x"}), list({"y"}), nullptr}), ConfigError);
}

TEST(RunTrial, SelfPairUsesOwnSlug) {
  TrialConfig c = base_config(SecretIdentity::kImitator);
  c.variant = {"a", "a"};
  c.target_slug = "vendor/a";
  const auto a = list({"Hi?", "<answer>1</answer>"});
  const TrialRecord r = run_trial(c, {a, a, nullptr});
  EXPECT_NE(r.actor_prompt.find("model type vendor/a"), std::string::npos);
  EXPECT_EQ(r.success, false);
}

TEST(RunTrial, ActorPromptCarriesFirstMessage) {
  const auto b = list({"What is your name?", "<answer>1</answer>"});
  const TrialRecord r = run_trial(base_config(SecretIdentity::kImitator), {list({"Claude."}), b, nullptr});
  EXPECT_NE(r.actor_prompt.find("\"What is your name?.\""), std::string::npos);
  const auto& actor = r.histories.at("actor");
  ASSERT_EQ(actor.size(), 2u);
  EXPECT_EQ(actor[0].role, ChatRole::kUser);
  EXPECT_EQ(actor[0].dialogue, "What is your name?");
  EXPECT_EQ(actor[1].role, ChatRole::kAssistant);
}

TEST(DrawSecret, FairCoin) {
  std::size_t imitator = 0;
  constexpr std::size_t n = 20000;
  for (std::size_t i = 0; i < n; ++i) {
    if (draw_secret(combine_seed(5, i)) == SecretIdentity::kImitator) ++imitator;
  }
  // sd of the fraction is 0.0035; 5 sd
  EXPECT_NEAR(static_cast<double>(imitator) / n, 0.5, 0.0177);
}

// Random tabular games exercise the invariants over many shapes.
class TrialInvariants : public ::testing::TestWithParam<int> {};

TEST_P(TrialInvariants, HoldOnRandomGames) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  const GameTables game = testing::random_oracle_game(rng);
  const auto agents = testing::tabular_agents(game);
  TrialConfig c;
  c.variant = {"A", "T"};
  c.variant.actor_query_phase = game.query_cap > 0;
  c.max_distinguisher_turns = game.horizon;
  c.max_specimen_turns = 1;
  for (std::uint64_t s = 0; s < 50; ++s) {
    c.rng_seed = combine_seed(GetParam(), s);
    const TrialRecord r = run_trial(c, {agents.actor, agents.target, nullptr});
    ASSERT_FALSE(r.failed());

    std::map<Channel, std::size_t> last;
    std::optional<Sender> prev_main;
    for (std::size_t i = 0; i < r.transcript.size(); ++i) {
      const Message& m = r.transcript[i];
      EXPECT_EQ(m.index, i);
      if (m.channel != Channel::kMain) continue;
      if (!prev_main) {
        EXPECT_EQ(m.sender, Sender::kDistinguisher);
      } else {
        EXPECT_NE(m.sender == Sender::kDistinguisher, *prev_main == Sender::kDistinguisher);
      }
      prev_main = m.sender;
    }
    EXPECT_LE(r.turns.distinguisher, c.max_distinguisher_turns);
    EXPECT_LE(r.turns.specimen_replies, c.max_specimen_turns);
    EXPECT_EQ(r.success, distinguisher_success(r.parsed, r.secret));

    // The distinguisher's history holds only main-channel payloads.
    std::vector<std::string> main_payloads;
    for (const auto& m : r.transcript) {
      if (m.channel == Channel::kMain) main_payloads.push_back(m.content);
    }
    std::vector<std::string> seen;
    for (const auto& t : r.histories.at("distinguisher")) {
      if (t.dialogue) seen.push_back(*t.dialogue);
    }
    EXPECT_EQ(seen, main_payloads);

    const TrialRecord again = run_trial(c, {agents.actor, agents.target, nullptr});
    EXPECT_TRUE(same_outcome(r, again));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, TrialInvariants, ::testing::Range(0, 24));

TEST(Serialize, RecordRoundTrip) {
  TrialConfig c = base_config(SecretIdentity::kImitator);
  c.variant.actor_query_phase = true;
  c.controlled_query_budget = 2;
  c.target_slug = "vendor/b";
  const auto actor = list({"q1", "q2", "I am b."});
  const auto target = list({"Hello?", "<answer>0</answer>"});
  TrialRecord r = run_trial(c, {actor, target, nullptr});
  r.env = {{"host", "h"}, {"container", std::nullopt}};

  const nlohmann::json j = r;
  EXPECT_EQ(j.at("schema_version"), kTrialSchemaVersion);
  EXPECT_EQ(j.at("secret"), "imitator");
  const TrialRecord back = j.get<TrialRecord>();
  EXPECT_TRUE(same_outcome(r, back));
  EXPECT_EQ(back.env, r.env);
  ASSERT_EQ(back.transcript.size(), r.transcript.size());
  for (std::size_t i = 0; i < r.transcript.size(); ++i) {
    EXPECT_EQ(format_utc(back.transcript[i].timestamp), format_utc(r.transcript[i].timestamp));
  }
  EXPECT_EQ(nlohmann::json(back), j);
}

TEST(Serialize, RejectsOtherSchemaVersions) {
  nlohmann::json j = run_trial(base_config(SecretIdentity::kTarget), {list({"x"}), list({"<answer>1</answer>"}), nullptr});
  j["schema_version"] = 99;
  EXPECT_THROW(j.get<TrialRecord>(), DomainError);
  j.erase("schema_version");
  EXPECT_THROW(j.get<TrialRecord>(), DomainError);
}

TEST(Timestamps, FormatAndParseRoundTrip) {
  const Timestamp t = parse_utc("2026-10-16T12:34:56.789Z");
  EXPECT_EQ(format_utc(t), "2026-10-16T12:34:56.789Z");
  EXPECT_EQ(format_utc_compact(t), "20261016T123456789Z");
  EXPECT_THROW(parse_utc("yesterday"), DomainError);
}

TEST(TrialConfig, RejectsZeroBudgets) {
  TrialConfig c = base_config(SecretIdentity::kTarget);
  c.max_distinguisher_turns = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = base_config(SecretIdentity::kTarget);
  c.controlled_turn_budget = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace gtt
