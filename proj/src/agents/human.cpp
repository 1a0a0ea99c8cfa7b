#include "gtt/agents/human.hpp"

namespace gtt {

void HumanRelayAgent::push(std::string reply) {
  std::lock_guard lock(mu_);
  queue_.push_back(std::move(reply));
}

std::size_t HumanRelayAgent::pending() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

AgentReply HumanRelayAgent::next_turn(const Conversation&) {
  std::lock_guard lock(mu_);
  if (queue_.empty()) throw BackendError("no reply from '" + handle_ + "' is waiting");
  AgentReply reply;
  reply.content = std::move(queue_.front());
  queue_.pop_front();
  reply.route = {"human-relay", "human", handle_, handle_};
  return reply;
}

}  // namespace gtt
