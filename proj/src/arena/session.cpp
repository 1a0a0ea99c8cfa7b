#include "gtt/arena/session.hpp"

namespace gtt {

std::string_view to_string(ArenaMode m) {
  return m == ArenaMode::kHumanActor ? "human_actor" : "human_distinguisher";
}

ArenaMode arena_mode_from_string(std::string_view s) {
  if (s == "human_distinguisher") return ArenaMode::kHumanDistinguisher;
  if (s == "human_actor") return ArenaMode::kHumanActor;
  throw ArenaError(400, "bad_request", "unknown mode '" + std::string(s) + "'");
}

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::kOpen:
      return "open";
    case SessionState::kAwaitingHuman:
      return "awaiting_human";
    case SessionState::kAwaitingAgent:
      return "awaiting_agent";
    case SessionState::kVerdictSubmitted:
      return "verdict_submitted";
    case SessionState::kRevealed:
      return "revealed";
    case SessionState::kExpired:
      return "expired";
  }
  return "?";
}

bool transition_allowed(SessionState from, SessionState to) {
  using S = SessionState;
  switch (from) {
    case S::kOpen:
      return to == S::kAwaitingAgent || to == S::kExpired;
    case S::kAwaitingAgent:
      return to == S::kAwaitingHuman || to == S::kOpen || to == S::kVerdictSubmitted;
    case S::kAwaitingHuman:
      return to == S::kAwaitingAgent || to == S::kVerdictSubmitted || to == S::kExpired;
    case S::kVerdictSubmitted:
      return to == S::kRevealed;
    case S::kRevealed:
    case S::kExpired:
      return false;
  }
  return false;
}

void transition(SessionState& state, SessionState to) {
  if (!transition_allowed(state, to)) {
    throw ArenaError(409, "illegal_transition",
                     "cannot go from " + std::string(to_string(state)) + " to " + std::string(to_string(to)));
  }
  state = to;
}

}  // namespace gtt
