#include "gtt/agents/remote.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "gtt/common/errors.hpp"

namespace gtt {

namespace {

using json = nlohmann::json;

struct SplitUrl {
  std::string origin;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL has no scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string describe(const HttpResponse& r) {
  switch (r.transport) {
    case HttpResponse::Transport::kTimeout:
      return "timeout: " + r.error;
    case HttpResponse::Transport::kConnection:
      return "connection error: " + r.error;
    case HttpResponse::Transport::kOther:
      return "transport error: " + r.error;
    case HttpResponse::Transport::kOk:
      break;
  }
  return "HTTP " + std::to_string(r.status);
}

class SlotGuard {
 public:
  explicit SlotGuard(InFlightLimit* limit) : limit_(limit) {
    if (limit_) limit_->acquire();
  }
  ~SlotGuard() {
    if (limit_) limit_->release();
  }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  InFlightLimit* limit_;
};

constexpr std::uint64_t kJitterSalt = 0x6a6974746572;

}  // namespace

HttpResponse HttplibTransport::post(const std::string& url, const Headers& headers, const std::string& body,
                                    Seconds timeout) {
  const SplitUrl target = split_url(url);
  httplib::Client client(target.origin);
  const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  client.set_connection_timeout(usec);
  client.set_read_timeout(usec);
  client.set_write_timeout(usec);

  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);

  HttpResponse out;
  auto res = client.Post(target.path, h, body, "application/json");
  if (!res) {
    const auto err = res.error();
    out.error = httplib::to_string(err);
    switch (err) {
      case httplib::Error::ConnectionTimeout:
        out.transport = HttpResponse::Transport::kTimeout;
        break;
      case httplib::Error::Connection:
      case httplib::Error::BindIPAddress:
      case httplib::Error::Read:
      case httplib::Error::Write:
      case httplib::Error::SSLConnection:
        out.transport = HttpResponse::Transport::kConnection;
        break;
      default:
        out.transport = HttpResponse::Transport::kOther;
        break;
    }
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

void RecordingTransport::enqueue(HttpResponse response) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(response));
}

void RecordingTransport::enqueue_reply(const std::string& content, const std::string& provider) {
  json body = {{"id", "fake"},
               {"model", "fake/model"},
               {"provider", provider},
               {"choices", json::array({{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}})}};
  enqueue({HttpResponse::Transport::kOk, 200, body.dump(), {}});
}

HttpResponse RecordingTransport::post(const std::string& url, const Headers& headers, const std::string& body,
                                      Seconds timeout) {
  std::lock_guard lock(mu_);
  requests_.push_back({url, headers, body, timeout});
  if (queue_.empty()) return {HttpResponse::Transport::kConnection, 0, {}, "no canned response left"};
  HttpResponse r = std::move(queue_.front());
  queue_.pop_front();
  return r;
}

std::vector<RecordingTransport::Request> RecordingTransport::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

void RetryPolicy::validate() const {
  if (request_timeout.count() <= 0) throw ConfigError("retry: request_timeout must be positive");
  if (backoff_base.count() <= 0) throw ConfigError("retry: backoff base must be positive");
  if (backoff_cap.count() <= 0) throw ConfigError("retry: backoff cap must be positive");
  if (!(backoff_factor > 1.0)) throw ConfigError("retry: backoff factor must exceed 1");
  if (max_attempts == 0) throw ConfigError("retry: max_attempts must be at least 1");
}

Seconds RetryPolicy::ceiling(std::size_t retry) const {
  const double raw = backoff_base.count() * std::pow(backoff_factor, static_cast<double>(retry));
  return Seconds(std::min(raw, backoff_cap.count()));
}

Seconds RetryPolicy::delay(std::size_t retry, std::mt19937_64& rng) const {
  const Seconds c = ceiling(retry);
  if (!jitter) return c;
  std::uniform_real_distribution<double> u(0.0, c.count());
  return Seconds(u(rng));
}

FailureClass classify(const HttpResponse& r) {
  switch (r.transport) {
    case HttpResponse::Transport::kTimeout:
    case HttpResponse::Transport::kConnection:
      return FailureClass::kTransient;
    case HttpResponse::Transport::kOther:
      return FailureClass::kPersistent;
    case HttpResponse::Transport::kOk:
      break;
  }
  if (r.status == 429 || r.status == 408 || r.status >= 500) return FailureClass::kTransient;
  return FailureClass::kPersistent;
}

Sleeper thread_sleeper() {
  return [](Seconds s) { std::this_thread::sleep_for(s); };
}

RemoteAgent::RemoteAgent(RemoteConfig config, std::shared_ptr<HttpTransport> transport,
                         std::shared_ptr<InFlightLimit> limit, Sleeper sleeper)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      limit_(std::move(limit)),
      sleeper_(std::move(sleeper)) {
  if (config_.model.empty()) throw ConfigError("remote agent '" + config_.name + "' has no model slug");
  if (!transport_) throw ConfigError("remote agent '" + config_.name + "' has no transport");
  split_url(config_.base_url);
  config_.retry.validate();
  if (config_.display_name.empty()) config_.display_name = config_.model;
}

json RemoteAgent::request_body(const Conversation& conversation) const {
  json messages = json::array();
  for (const auto& turn : conversation.turns) {
    messages.push_back({{"role", turn.role == ChatRole::kUser ? "user" : "assistant"}, {"content", turn.content}});
  }
  json body = {{"model", config_.model}, {"messages", std::move(messages)}};
  for (const auto& [k, v] : config_.sampling.items()) body[k] = v;
  return body;
}

std::string RemoteAgent::redact(std::string text) const {
  if (config_.api_key.empty()) return text;
  for (auto pos = text.find(config_.api_key); pos != std::string::npos; pos = text.find(config_.api_key, pos)) {
    text.replace(pos, config_.api_key.size(), "[REDACTED]");
  }
  return text;
}

AgentReply RemoteAgent::next_turn(const Conversation& conversation) {
  const std::string url = config_.base_url + "/chat/completions";
  const std::string payload = request_body(conversation).dump();
  Headers headers = {{"Content-Type", "application/json"}};
  if (!config_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config_.api_key);

  std::mt19937_64 rng(combine_seed(conversation.seed, combine_seed(kJitterSalt, conversation.own_turns())));
  std::vector<std::string> log;

  for (std::size_t attempt = 1;; ++attempt) {
    if (config_.debug_sink) config_.debug_sink(redact("request " + url + " " + payload));
    HttpResponse response;
    {
      SlotGuard slot(limit_.get());
      response = transport_->post(url, headers, payload, config_.retry.request_timeout);
    }
    if (config_.debug_sink) {
      config_.debug_sink(redact("response " + describe(response) + " " + response.body));
    }

    std::string failure;
    bool transient = false;
    if (response.transport == HttpResponse::Transport::kOk && response.status == 200) {
      try {
        const json body = json::parse(response.body);
        if (body.contains("error")) {
          failure = "provider error in 200 body: " + body.at("error").dump();
        } else {
          AgentReply reply;
          reply.content = body.at("choices").at(0).at("message").at("content").get<std::string>();
          reply.route = {"remote", body.value("provider", split_url(config_.base_url).origin),
                         config_.display_name, body.value("model", config_.model)};
          log.push_back("attempt " + std::to_string(attempt) + ": HTTP 200");
          reply.attempt_log = std::move(log);
          return reply;
        }
      } catch (const json::exception& e) {
        failure = std::string("malformed response: ") + e.what();
      }
      transient = true;
    } else {
      failure = describe(response);
      transient = classify(response) == FailureClass::kTransient;
    }

    log.push_back("attempt " + std::to_string(attempt) + ": " + failure);
    if (!transient) {
      throw BackendError("persistent failure from " + config_.model + ": " + failure, std::move(log), false);
    }
    if (attempt >= config_.retry.max_attempts) {
      throw BackendError("retries exhausted for " + config_.model + ": " + failure, std::move(log), true);
    }
    sleeper_(config_.retry.delay(attempt - 1, rng));
  }
}

}  // namespace gtt
