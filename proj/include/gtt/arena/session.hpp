#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gtt/common/errors.hpp"
#include "gtt/protocol/types.hpp"

namespace gtt {

enum class ArenaMode { kHumanDistinguisher, kHumanActor };

std::string_view to_string(ArenaMode m);
ArenaMode arena_mode_from_string(std::string_view s);

enum class SessionState { kOpen, kAwaitingHuman, kAwaitingAgent, kVerdictSubmitted, kRevealed, kExpired };

inline constexpr SessionState kAllSessionStates[] = {SessionState::kOpen,          SessionState::kAwaitingHuman,
                                                     SessionState::kAwaitingAgent, SessionState::kVerdictSubmitted,
                                                     SessionState::kRevealed,      SessionState::kExpired};

std::string_view to_string(SessionState s);

/// The declared transition graph:
///   open -> awaiting_agent | expired
///   awaiting_agent -> awaiting_human | open | verdict_submitted
///   awaiting_human -> awaiting_agent | verdict_submitted | expired
///   verdict_submitted -> revealed
/// awaiting_agent -> open undoes a failed first exchange.
bool transition_allowed(SessionState from, SessionState to);

/// Error carrying the HTTP status and a stable machine-readable code.
class ArenaError : public Error {
 public:
  ArenaError(int status, std::string code, const std::string& message)
      : Error(message), status_(status), code_(std::move(code)) {}

  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

/// Throws ArenaError 409 "illegal_transition" outside the graph.
void transition(SessionState& state, SessionState to);

}  // namespace gtt
