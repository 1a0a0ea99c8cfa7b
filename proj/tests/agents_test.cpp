#include <gtest/gtest.h>

#include <httplib.h>

#include <algorithm>
#include <thread>

#include <nlohmann/json.hpp>

#include "gtt/agents/factory.hpp"
#include "gtt/agents/human.hpp"
#include "gtt/agents/remote.hpp"
#include "gtt/agents/scripted.hpp"
#include "support/support.hpp"

namespace gtt {
namespace {

using json = nlohmann::json;

Conversation conversation(AgentRole role, std::vector<ChatTurn> turns) {
  Conversation c;
  c.role = role;
  c.self_model = "m";
  c.target_model = "m";
  c.turns = std::move(turns);
  c.seed = 17;
  return c;
}

const Conversation kActorTurn = conversation(AgentRole::kActor, {{ChatRole::kUser, "Imitate m. First message: hi", "hi"}});

HttpResponse status(int code, std::string body = "{}") { return {HttpResponse::Transport::kOk, code, std::move(body), {}}; }

struct Fixture {
  std::shared_ptr<RecordingTransport> transport = std::make_shared<RecordingTransport>();
  std::vector<double> sleeps;

  RemoteAgent agent(RetryPolicy retry = {}, json sampling = json::object(), std::string key = "sk-secret") {
    RemoteConfig cfg;
    cfg.name = "m";
    cfg.model = "vendor/m";
    cfg.api_key = std::move(key);
    cfg.sampling = std::move(sampling);
    cfg.retry = retry;
    cfg.base_url = "http://gateway.test/v1";
    return RemoteAgent(cfg, transport, nullptr, [this](Seconds s) { sleeps.push_back(s.count()); });
  }
};

TEST(ScriptedAgent, IndexedReplies) {
  ScriptedAgent a("s", {{AgentRole::kTarget, Script{{"a", "b"}, {}}}});
  auto c = conversation(AgentRole::kTarget, {{ChatRole::kUser, "q1", "q1"}, {ChatRole::kAssistant, "a", "a"}, {ChatRole::kUser, "q2", "q2"}});
  EXPECT_EQ(a.next_turn(c).content, "b");
  c.turns.push_back({ChatRole::kAssistant, "b", "b"});
  c.turns.push_back({ChatRole::kUser, "q3", "q3"});
  EXPECT_EQ(a.next_turn(c).content, "b");
}

TEST(ScriptedAgent, TriggersAndFallback) {
  ScriptedAgent a("s", {{AgentRole::kDistinguisher, Script{{"ask", "<answer>0</answer>"}, {{"banana", "<answer>1</answer>"}}}}},
                  Script{{"fallback"}, {}});
  auto c = conversation(AgentRole::kDistinguisher, {{ChatRole::kUser, "prompt", std::nullopt}});
  EXPECT_EQ(a.next_turn(c).content, "ask");
  c.turns.push_back({ChatRole::kAssistant, "ask", "ask"});
  c.turns.push_back({ChatRole::kUser, "I like banana", "I like banana"});
  EXPECT_EQ(a.next_turn(c).content, "<answer>1</answer>");
  EXPECT_EQ(a.next_turn(conversation(AgentRole::kActor, {})).content, "fallback");
}

TEST(ScriptedAgent, MissingScripts) {
  EXPECT_THROW(ScriptedAgent("s", {}), ConfigError);
  EXPECT_THROW(ScriptedAgent("s", {{AgentRole::kActor, Script{}}}), ConfigError);
  ScriptedAgent a("s", {{AgentRole::kActor, Script{{"x"}, {}}}});
  EXPECT_THROW(a.next_turn(conversation(AgentRole::kTarget, {})), BackendError);
}

TEST(RemoteAgent, RetriesRateLimitsThenSucceeds) {
  Fixture f;
  f.transport->enqueue(status(429));
  f.transport->enqueue(status(429));
  f.transport->enqueue_reply("Hello there.", "prov");
  RetryPolicy retry;
  auto agent = f.agent(retry);
  const AgentReply r = agent.next_turn(kActorTurn);
  EXPECT_EQ(r.content, "Hello there.");
  ASSERT_EQ(f.sleeps.size(), 2u);
  EXPECT_LE(f.sleeps[0], retry.ceiling(0).count());
  EXPECT_LE(f.sleeps[1], retry.ceiling(1).count());
  ASSERT_EQ(r.attempt_log.size(), 3u);
  EXPECT_EQ(r.attempt_log[0], "attempt 1: HTTP 429");
  EXPECT_EQ(r.attempt_log[1], "attempt 2: HTTP 429");
  EXPECT_EQ(r.attempt_log[2], "attempt 3: HTTP 200");
  EXPECT_EQ(r.route.backend, "remote");
  EXPECT_EQ(r.route.provider, "prov");
}

TEST(RemoteAgent, PersistentFailureStopsAtOnce) {
  Fixture f;
  f.transport->enqueue(status(401));
  auto agent = f.agent();
  try {
    agent.next_turn(kActorTurn);
    FAIL() << "expected BackendError";
  } catch (const BackendError& e) {
    EXPECT_FALSE(e.transient());
    EXPECT_EQ(e.attempt_log(), std::vector<std::string>{"attempt 1: HTTP 401"});
  }
  EXPECT_TRUE(f.sleeps.empty());
}

TEST(RemoteAgent, ExhaustsAttemptsOnTransientFailures) {
  Fixture f;
  RetryPolicy retry;
  retry.max_attempts = 3;
  f.transport->enqueue(status(503));
  f.transport->enqueue({HttpResponse::Transport::kTimeout, 0, {}, "read timed out"});
  f.transport->enqueue(status(502));
  auto agent = f.agent(retry);
  try {
    agent.next_turn(kActorTurn);
    FAIL() << "expected BackendError";
  } catch (const BackendError& e) {
    EXPECT_TRUE(e.transient());
    ASSERT_EQ(e.attempt_log().size(), 3u);
    EXPECT_EQ(e.attempt_log()[1], "attempt 2: timeout: read timed out");
  }
  EXPECT_EQ(f.sleeps.size(), 2u);
  EXPECT_EQ(f.transport->requests().size(), 3u);
}

TEST(RemoteAgent, ErrorBodiesAndMalformedRepliesAreRetried) {
  Fixture f;
  f.transport->enqueue(status(200, R"({"error": {"message": "upstream overloaded"}})"));
  f.transport->enqueue(status(200, "not json"));
  f.transport->enqueue_reply("ok");
  auto agent = f.agent();
  const AgentReply r = agent.next_turn(kActorTurn);
  EXPECT_EQ(r.content, "ok");
  EXPECT_EQ(r.attempt_log.size(), 3u);
  EXPECT_EQ(f.sleeps.size(), 2u);
}

TEST(RemoteAgent, RequestsUseOnlyUserAndAssistantRoles) {
  Fixture f;
  f.transport->enqueue_reply("second");
  auto agent = f.agent();
  const auto c = conversation(AgentRole::kDistinguisher, {{ChatRole::kUser, "You will be interacting with another agent.", std::nullopt},
                                                         {ChatRole::kAssistant, "Who are you?", "Who are you?"},
                                                         {ChatRole::kUser, "A model.", "A model."}});
  agent.next_turn(c);
  const auto reqs = f.transport->requests();
  ASSERT_EQ(reqs.size(), 1u);
  EXPECT_EQ(reqs[0].url, "http://gateway.test/v1/chat/completions");
  EXPECT_DOUBLE_EQ(reqs[0].timeout.count(), 480.0);
  const json body = json::parse(reqs[0].body);
  EXPECT_EQ(body.at("model"), "vendor/m");
  ASSERT_EQ(body.at("messages").size(), 3u);
  for (const auto& m : body.at("messages")) EXPECT_NE(m.at("role"), "system");
  EXPECT_EQ(body.at("messages")[0].at("role"), "user");
  EXPECT_EQ(body.at("messages")[1].at("role"), "assistant");
  EXPECT_EQ(body.at("messages")[0].at("content"), "You will be interacting with another agent.");
  EXPECT_FALSE(body.contains("temperature"));
  EXPECT_FALSE(body.contains("top_p"));
  const auto auth = std::find_if(reqs[0].headers.begin(), reqs[0].headers.end(),
                                 [](const auto& h) { return h.first == "Authorization"; });
  ASSERT_NE(auth, reqs[0].headers.end());
  EXPECT_EQ(auth->second, "Bearer sk-secret");
}

TEST(RemoteAgent, ConfiguredSamplingIsSent) {
  Fixture f;
  f.transport->enqueue_reply("x");
  auto agent = f.agent({}, {{"temperature", 0.3}});
  agent.next_turn(kActorTurn);
  EXPECT_EQ(json::parse(f.transport->requests()[0].body).at("temperature"), 0.3);
}

TEST(RemoteAgent, DebugSinkRedactsKey) {
  auto transport = std::make_shared<RecordingTransport>();
  transport->enqueue(status(500, R"({"echo": "sk-secret"})"));
  transport->enqueue_reply("fine");
  std::vector<std::string> lines;
  RemoteConfig cfg;
  cfg.name = "m";
  cfg.model = "vendor/m";
  cfg.api_key = "sk-secret";
  cfg.debug_sink = [&](std::string_view l) { lines.emplace_back(l); };
  RemoteAgent agent(cfg, transport, nullptr, [](Seconds) {});
  agent.next_turn(kActorTurn);
  ASSERT_EQ(lines.size(), 4u);
  for (const auto& l : lines) EXPECT_EQ(l.find("sk-secret"), std::string::npos) << l;
  EXPECT_NE(lines[1].find("[REDACTED]"), std::string::npos);
}

TEST(RemoteAgent, JitterIsReproduciblePerConversation) {
  Fixture a, b;
  for (auto* f : {&a, &b}) {
    f->transport->enqueue(status(503));
    f->transport->enqueue(status(503));
    f->transport->enqueue_reply("x");
    f->agent().next_turn(kActorTurn);
  }
  EXPECT_EQ(a.sleeps, b.sleeps);
}

TEST(RemoteAgent, RejectsBadConfig) {
  auto t = std::make_shared<RecordingTransport>();
  RemoteConfig cfg;
  cfg.name = "m";
  EXPECT_THROW(RemoteAgent(cfg, t), ConfigError);
  cfg.model = "vendor/m";
  EXPECT_THROW(RemoteAgent(cfg, nullptr), ConfigError);
  cfg.base_url = "gateway.test";
  EXPECT_THROW(RemoteAgent(cfg, t), ConfigError);
}

TEST(RetryPolicy, BackoffGrowsToCap) {
  RetryPolicy p;
  p.backoff_base = Seconds(1);
  p.backoff_factor = 2;
  p.backoff_cap = Seconds(10);
  std::vector<double> seen;
  for (std::size_t i = 0; i < 6; ++i) seen.push_back(p.ceiling(i).count());
  EXPECT_EQ(seen, (std::vector<double>{1, 2, 4, 8, 10, 10}));
  for (std::size_t i = 0; i + 1 < seen.size(); ++i) {
    if (seen[i] < 10) EXPECT_LT(seen[i], seen[i + 1]);
  }
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double d = p.delay(3, rng).count();
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 8.0);
  }
  p.jitter = false;
  EXPECT_DOUBLE_EQ(p.delay(2, rng).count(), 4.0);
}

TEST(RetryPolicy, Validation) {
  RetryPolicy p;
  EXPECT_NO_THROW(p.validate());
  p.request_timeout = Seconds(0);
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.backoff_factor = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.max_attempts = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Classify, StatusTable) {
  EXPECT_EQ(classify(status(429)), FailureClass::kTransient);
  EXPECT_EQ(classify(status(408)), FailureClass::kTransient);
  EXPECT_EQ(classify(status(500)), FailureClass::kTransient);
  EXPECT_EQ(classify(status(503)), FailureClass::kTransient);
  EXPECT_EQ(classify(status(400)), FailureClass::kPersistent);
  EXPECT_EQ(classify(status(401)), FailureClass::kPersistent);
  EXPECT_EQ(classify(status(404)), FailureClass::kPersistent);
  EXPECT_EQ(classify({HttpResponse::Transport::kConnection, 0, {}, "refused"}), FailureClass::kTransient);
  EXPECT_EQ(classify({HttpResponse::Transport::kTimeout, 0, {}, "slow"}), FailureClass::kTransient);
  EXPECT_EQ(classify({HttpResponse::Transport::kOther, 0, {}, "tls"}), FailureClass::kPersistent);
}

// Holds each request briefly and records the peak number in flight.
class SlowTransport : public HttpTransport {
 public:
  HttpResponse post(const std::string&, const Headers&, const std::string&, Seconds) override {
    const int now = ++active_;
    int peak = peak_.load();
    while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    --active_;
    json body = {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", "x"}}}}})}};
    return {HttpResponse::Transport::kOk, 200, body.dump(), {}};
  }
  int peak() const { return peak_; }

 private:
  std::atomic<int> active_{0};
  std::atomic<int> peak_{0};
};

TEST(InFlightLimit, CapsConcurrentRequests) {
  auto transport = std::make_shared<SlowTransport>();
  auto limit = std::make_shared<InFlightLimit>(2);
  RemoteConfig cfg;
  cfg.name = "m";
  cfg.model = "vendor/m";
  RemoteAgent agent(cfg, transport, limit, [](Seconds) {});
  std::vector<std::jthread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { agent.next_turn(kActorTurn); });
  threads.clear();
  EXPECT_LE(transport->peak(), 2);
  EXPECT_GE(transport->peak(), 1);
}

TEST(HttplibTransport, TalksToALocalServer) {
  httplib::Server server;
  int hits = 0;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    if (req.get_header_value("Authorization") != "Bearer k") {
      res.status = 401;
      return;
    }
    if (hits == 1) {
      res.status = 503;
      return;
    }
    const json in = json::parse(req.body);
    json body = {{"model", in.at("model")},
                 {"provider", "local"},
                 {"choices", json::array({{{"message", {{"role", "assistant"}, {"content", "pong"}}}}})}};
    res.set_content(body.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  RemoteConfig cfg;
  cfg.name = "m";
  cfg.model = "vendor/m";
  cfg.api_key = "k";
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  RemoteAgent agent(cfg, std::make_shared<HttplibTransport>(), nullptr, [](Seconds) {});
  const AgentReply r = agent.next_turn(kActorTurn);
  EXPECT_EQ(r.content, "pong");
  EXPECT_EQ(r.attempt_log, (std::vector<std::string>{"attempt 1: HTTP 503", "attempt 2: HTTP 200"}));
  EXPECT_EQ(r.route.model_id, "vendor/m");
  server.stop();
  t.join();

  HttplibTransport direct;
  const HttpResponse refused = direct.post("http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions", {}, "{}", Seconds(2));
  EXPECT_EQ(refused.transport, HttpResponse::Transport::kConnection);
}

TEST(HumanRelay, QueuedRepliesAreConsumedInOrder) {
  HumanRelayAgent h("ana");
  EXPECT_THROW(h.next_turn(kActorTurn), BackendError);
  h.push("first");
  h.push("second");
  EXPECT_EQ(h.pending(), 2u);
  EXPECT_EQ(h.next_turn(kActorTurn).content, "first");
  const AgentReply r = h.next_turn(kActorTurn);
  EXPECT_EQ(r.content, "second");
  EXPECT_EQ(r.route.backend, "human-relay");
  EXPECT_EQ(h.pending(), 0u);
}

TEST(ModelSpec, JsonAndValidation) {
  const json remote = {{"id", "gpt"}, {"model", "openai/gpt"}, {"sampling", {{"temperature", 1.0}}}};
  const ModelSpec s = remote.get<ModelSpec>();
  EXPECT_EQ(s.kind, BackendKind::kRemote);
  EXPECT_EQ(s.slug(), "openai/gpt");
  EXPECT_EQ(json(s).get<ModelSpec>().sampling, s.sampling);

  const json scripted = {{"id", "bot"}, {"kind", "scripted"}, {"scripts", {{"actor", {"hi"}}, {"distinguisher", {{"replies", {"q", "<answer>1</answer>"}}}}}}};
  const ModelSpec b = scripted.get<ModelSpec>();
  EXPECT_EQ(b.slug(), "bot");
  EXPECT_EQ(b.scripts.at(AgentRole::kDistinguisher).replies.size(), 2u);
  EXPECT_NO_THROW(b.validate());

  EXPECT_THROW((json{{"id", "x"}}.get<ModelSpec>().validate()), ConfigError);
  EXPECT_THROW((json{{"id", "x"}, {"kind", "scripted"}}.get<ModelSpec>().validate()), ConfigError);
  EXPECT_THROW((json{{"id", "x"}, {"kind", "tabular"}}.get<ModelSpec>().validate()), ConfigError);
  EXPECT_THROW((json{{"id", "x"}, {"kind", "carrier-pigeon"}}.get<ModelSpec>()), ConfigError);
  EXPECT_THROW((json{{"id", "x"}, {"kind", "scripted"}, {"scripts", {{"judge", {"x"}}}}}.get<ModelSpec>()), ConfigError);
}

TEST(AgentRegistry, BuildsLazilyAndRejectsUnknownIds) {
  auto transport = std::make_shared<RecordingTransport>();
  transport->enqueue_reply("from remote");
  BackendContext ctx;
  ctx.transport = transport;
  ctx.sleeper = [](Seconds) {};
  ctx.env = [](const std::string& name) -> std::optional<std::string> {
    if (name == "GTT_API_BASE") return "http://proxy.test/api";
    if (name == "MY_KEY") return "key-123";
    return std::nullopt;
  };
  ModelSpec remote;
  remote.id = "r";
  remote.kind = BackendKind::kRemote;
  remote.model = "vendor/r";
  remote.api_key_env = "MY_KEY";
  AgentRegistry reg({remote, testing::scripted_model("s")}, ctx);

  EXPECT_TRUE(reg.contains("s"));
  EXPECT_EQ(reg.ids(), (std::vector<std::string>{"r", "s"}));
  EXPECT_EQ(reg.agent("s"), reg.agent("s"));
  try {
    reg.agent("x");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown model"), std::string::npos);
  }
  EXPECT_EQ(reg.agent("r")->next_turn(kActorTurn).content, "from remote");
  const auto req = transport->requests().at(0);
  EXPECT_EQ(req.url, "http://proxy.test/api/chat/completions");
  EXPECT_NE(std::find(req.headers.begin(), req.headers.end(), std::pair<std::string, std::string>{"Authorization", "Bearer key-123"}),
            req.headers.end());

  EXPECT_THROW(AgentRegistry({testing::scripted_model("s"), testing::scripted_model("s")}, ctx), ConfigError);
}

TEST(AgentRegistry, InlineTabularModel) {
  const json table = {{"name", "tab"}, {"self", {{"depth", 0}, {"rows", json::array({{{"context", json::array()}, {"dist", {{"x", 1.0}}}}})}}}};
  ModelSpec spec;
  spec.id = "tab";
  spec.kind = BackendKind::kTabular;
  spec.table = table;
  AgentRegistry reg({spec}, {});
  auto c = conversation(AgentRole::kTarget, {});
  c.self_model = c.target_model = "tab";
  EXPECT_EQ(reg.agent("tab")->next_turn(c).content, "x");
}

}  // namespace
}  // namespace gtt
