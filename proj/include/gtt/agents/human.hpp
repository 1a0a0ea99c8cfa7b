#pragma once

#include <deque>
#include <mutex>
#include <string>

#include "gtt/protocol/agent.hpp"

namespace gtt {

/// Relays replies typed by a person. Replies are queued ahead of the turn
/// that consumes them; a turn with nothing queued is a backend failure.
class HumanRelayAgent : public Agent {
 public:
  explicit HumanRelayAgent(std::string handle) : handle_(std::move(handle)) {}

  void push(std::string reply);
  std::size_t pending() const;

  AgentReply next_turn(const Conversation& conversation) override;

 private:
  std::string handle_;
  mutable std::mutex mu_;
  std::deque<std::string> queue_;
};

}  // namespace gtt
