#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gtt/common/errors.hpp"
#include "gtt/protocol/types.hpp"

namespace gtt {

struct AgentReply {
  std::string content;
  RouteInfo route;
  /// One line per backend attempt, including the successful one.
  std::vector<std::string> attempt_log;
};

/// A participant that produces the next message of a conversation it is
/// handed in full. Implementations hold no per-conversation state, so one
/// instance can serve any number of concurrent trials.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual AgentReply next_turn(const Conversation& conversation) = 0;
};

/// The backend could not produce a turn. Carries one line per attempt.
class BackendError : public Error {
 public:
  BackendError(std::string message, std::vector<std::string> attempt_log = {}, bool transient = false)
      : Error(std::move(message)), attempt_log_(std::move(attempt_log)), transient_(transient) {}

  const std::vector<std::string>& attempt_log() const { return attempt_log_; }
  bool transient() const { return transient_; }

 private:
  std::vector<std::string> attempt_log_;
  bool transient_;
};

}  // namespace gtt
