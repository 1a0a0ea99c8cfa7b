#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gtt/protocol/agent.hpp"

namespace gtt {

using Seconds = std::chrono::duration<double>;
using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  enum class Transport { kOk, kTimeout, kConnection, kOther };

  Transport transport = Transport::kOk;
  int status = 0;
  std::string body;
  /// Transport-level description when `transport` is not kOk.
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url, const Headers& headers, const std::string& body,
                            Seconds timeout) = 0;
};

/// cpp-httplib client; one connection per request.
class HttplibTransport : public HttpTransport {
 public:
  HttpResponse post(const std::string& url, const Headers& headers, const std::string& body,
                    Seconds timeout) override;
};

/// Replays canned responses in order and records every request.
class RecordingTransport : public HttpTransport {
 public:
  struct Request {
    std::string url;
    Headers headers;
    std::string body;
    Seconds timeout{};
  };

  void enqueue(HttpResponse response);
  /// Convenience for a 200 chat-completions reply.
  void enqueue_reply(const std::string& content, const std::string& provider = "fake-provider");

  HttpResponse post(const std::string& url, const Headers& headers, const std::string& body,
                    Seconds timeout) override;

  std::vector<Request> requests() const;

 private:
  mutable std::mutex mu_;
  std::deque<HttpResponse> queue_;
  std::vector<Request> requests_;
};

struct RetryPolicy {
  Seconds request_timeout{480.0};
  Seconds backoff_base{1.0};
  double backoff_factor = 2.0;
  Seconds backoff_cap{60.0};
  std::size_t max_attempts = 6;
  bool jitter = true;

  /// Throws ConfigError on a non-positive timeout, base or cap, a factor
  /// not above 1, or zero attempts.
  void validate() const;
  /// Ceiling of the delay before retry `retry` (0-based): base * factor^retry, capped.
  Seconds ceiling(std::size_t retry) const;
  /// Full jitter: uniform in [0, ceiling]; the ceiling itself when jitter is off.
  Seconds delay(std::size_t retry, std::mt19937_64& rng) const;
};

enum class FailureClass { kTransient, kPersistent };

FailureClass classify(const HttpResponse& response);

using Sleeper = std::function<void(Seconds)>;

/// Real sleeping; tests inject a recorder instead.
Sleeper thread_sleeper();

/// Upper bound on requests in flight across all remote agents sharing it.
class InFlightLimit {
 public:
  explicit InFlightLimit(std::ptrdiff_t max) : sem_(max) {}
  void acquire() { sem_.acquire(); }
  void release() { sem_.release(); }

 private:
  std::counting_semaphore<> sem_;
};

struct RemoteConfig {
  std::string name;
  std::string model;
  std::string display_name;
  std::string base_url = "https://openrouter.ai/api/v1";
  std::string api_key;
  /// Extra body fields such as temperature; empty means provider defaults.
  nlohmann::json sampling = nlohmann::json::object();
  RetryPolicy retry;
  /// Receives request and response bodies with the API key redacted.
  std::function<void(std::string_view)> debug_sink;
};

/// OpenAI-compatible chat-completions client. Every instruction and relayed
/// message is a user message; the agent's own turns are assistant messages.
class RemoteAgent : public Agent {
 public:
  RemoteAgent(RemoteConfig config, std::shared_ptr<HttpTransport> transport,
              std::shared_ptr<InFlightLimit> limit = nullptr, Sleeper sleeper = thread_sleeper());

  AgentReply next_turn(const Conversation& conversation) override;

  /// The request body for a conversation, as sent on the wire.
  nlohmann::json request_body(const Conversation& conversation) const;

 private:
  std::string redact(std::string text) const;

  RemoteConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  std::shared_ptr<InFlightLimit> limit_;
  Sleeper sleeper_;
};

}  // namespace gtt
