#pragma once

#include <functional>
#include <memory>

#include "gtt/protocol/agent.hpp"
#include "gtt/protocol/prompts.hpp"
#include "gtt/protocol/types.hpp"

namespace gtt {

/// Backends for the models a trial needs. The specimen instances use the
/// target backend; the distinguisher uses `fixed_distinguisher` when the
/// variant names one and the target backend otherwise.
struct TrialAgents {
  std::shared_ptr<Agent> actor;
  std::shared_ptr<Agent> target;
  std::shared_ptr<Agent> fixed_distinguisher;
};

struct TrialOptions {
  const PromptTemplates* templates = nullptr;
  std::function<Timestamp()> now;
};

/// Plays one game to completion. Backend failures end the trial early with
/// `failure` set; an exhausted turn budget yields an unparseable verdict.
TrialRecord run_trial(const TrialConfig& config, const TrialAgents& agents, const TrialOptions& options = {});

/// Fair coin from the trial seed; the draw run_trial uses when no secret is forced.
SecretIdentity draw_secret(std::uint64_t rng_seed);

}  // namespace gtt
