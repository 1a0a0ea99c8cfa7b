#pragma once

#include <cstddef>
#include <optional>

#include "gtt/common/errors.hpp"
#include "gtt/tabular/policy.hpp"

namespace gtt {

class HorizonError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The agents of one game, reduced to the tables they play. The same
/// description covers GTT (distinguisher is the target's judging table) and
/// FDGTT (distinguisher is a third model's table for this target).
struct GameTables {
  MixedPolicy distinguisher;
  MixedPolicy target_self;
  MixedPolicy imitator;
  /// Specimen for the actor's query stage; `target_self` when unset.
  std::optional<MixedPolicy> specimen;
  /// Maximum number of distinguisher messages in the main phase.
  std::size_t horizon = 2;
  /// Specimen replies allowed in the actor's query stage; 0 disables it.
  std::size_t query_cap = 0;
};

struct ExactBranches {
  /// Pr[verdict 1 | secret = target].
  double s_self = 0.0;
  /// Pr[verdict 0 | secret = imitator].
  double s_imit = 0.0;

  double success() const { return 0.5 * s_self + 0.5 * s_imit; }
  double advantage() const { return success() - 0.5; }
};

/// Sums over every interaction path, mirroring run_trial turn for turn.
/// Throws HorizonError when some path reaches the horizon without a verdict.
ExactBranches exact_branches(const GameTables& game);

inline double exact_gtt_success(const GameTables& game) { return exact_branches(game).success(); }

}  // namespace gtt
