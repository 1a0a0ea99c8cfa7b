#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gtt/common/errors.hpp"
#include "gtt/theory/distance.hpp"
#include "gtt/theory/exact.hpp"

namespace gtt {

enum class Theorem { kP1, kT2, kT3, kT4 };

std::string_view to_string(Theorem t);
Theorem theorem_from_string(std::string_view s);

inline constexpr double kBoundTolerance = 1e-12;
inline constexpr std::string_view kImitateC = "IMIT_C";
inline constexpr std::string_view kAck = "ACK";

/// An instance breaks a hypothesis of the theorem it is checked against.
class HypothesisError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Triangle inequality of the L1 distance over a context distribution.
struct P1Instance {
  TabularPolicy a;
  TabularPolicy b;
  TabularPolicy c;
  ContextDistribution contexts;
};

/// Querying can only help an actor that ignores the specimen with
/// probability at least 1 - eps2.
struct T2Instance {
  MixedPolicy target_self;
  MixedPolicy target_distinguisher;
  /// The actor's imitation without a query stage.
  MixedPolicy actor;
  /// Query behaviour of the part that ignores the specimen.
  TabularPolicy ignoring_queries;
  /// Query stage and main phase of the remaining part, keyed on the transcript.
  MixedPolicy deviant;
  double eps2 = 0.0;
  std::size_t horizon = 2;
  std::size_t query_cap = 1;
  std::size_t alphabet = 2;
  std::optional<double> eps1;
};

/// Transitivity through a Turing-recursive middle model B. Tables answering
/// the imitation request carry rows behind [IMIT_C, ACK].
struct T3Instance {
  MixedPolicy c_self;
  MixedPolicy c_distinguisher;
  /// B-as-C-as-distinguisher is (1 - gamma) C's distinguisher plus gamma of this.
  MixedPolicy other_distinguisher;
  /// B's distinguisher when it does not recurse; must not be worse than chance.
  MixedPolicy b_plain_distinguisher;
  /// B as interlocutor, including its answers to the imitation request.
  MixedPolicy b_self;
  /// A imitating B, including its answers to the imitation request.
  MixedPolicy a_as_b;
  /// A-as-C is (1 - delta) A-as-B-as-C plus delta of this.
  MixedPolicy other_actor;
  double zeta = 1.0;
  double gamma = 0.0;
  double delta = 0.0;
  std::size_t horizon = 2;
  std::optional<double> alpha;
  std::optional<double> beta;
  /// Set for instances built from a target epsilon.
  std::optional<double> epsilon;
};

/// Transitivity for a fixed distinguisher D that, when judging B, uses its
/// protocol for C with probability zeta.
struct T4Instance {
  MixedPolicy b_self;
  MixedPolicy c_self;
  /// A's imitation table, used for both targets.
  MixedPolicy a_imitation;
  MixedPolicy d_judging_c;
  MixedPolicy d_own_b;
  double zeta = 1.0;
  std::size_t horizon = 2;
  std::optional<double> alpha;
  std::optional<double> beta;
};

using BoundInstance = std::variant<P1Instance, T2Instance, T3Instance, T4Instance>;

struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double slack() const { return rhs - lhs; }
};

struct BoundReport {
  Theorem theorem = Theorem::kP1;
  /// The theorem's inequality first, then any derived checks.
  std::vector<BoundCheck> checks;
  /// Measured advantages, parameters and informational quantities.
  std::map<std::string, double> values;
  /// Reported alongside the theorem but not part of the verdict.
  std::vector<BoundCheck> informational;

  bool holds() const;
  double worst_slack() const;
};

/// Measures the instance exactly and checks the theorem's inequality.
/// Throws HypothesisError naming the first hypothesis the instance breaks.
BoundReport verify_bound(const BoundInstance& instance);

P1Instance random_p1_instance(std::mt19937_64& rng);
T2Instance random_t2_instance(std::mt19937_64& rng, std::optional<double> eps2 = std::nullopt);
T3Instance random_t3_instance(std::mt19937_64& rng);
/// Parameters alpha = eps^2/4, beta, gamma, delta <= eps/4 and zeta = eps.
T3Instance random_t3_epsilon_instance(std::mt19937_64& rng, double epsilon);
T4Instance random_t4_instance(std::mt19937_64& rng, std::optional<double> zeta = std::nullopt);

enum class TheoryPair { kAB, kBC, kAC };

/// Games assembled from an instance, exposed for tests.
GameTables t2_plain_game(const T2Instance& inst);
GameTables t2_querying_game(const T2Instance& inst);
GameTables t3_game(const T3Instance& inst, TheoryPair pair);
/// GTT(A, B) with B's non-recursive distinguisher alone.
GameTables t3_plain_game(const T3Instance& inst);
GameTables t4_game(const T4Instance& inst, TheoryPair pair);

struct SuiteReport {
  Theorem theorem = Theorem::kP1;
  std::size_t instances = 0;
  std::size_t passed = 0;
  std::size_t rejected = 0;
  double worst_slack = 0.0;
  std::size_t worst_index = 0;
  /// Name of the check with the smallest slack.
  std::string worst_check;
  /// First failing instance, serialised for reproduction.
  std::optional<nlohmann::json> first_failure;
  std::map<std::string, std::size_t> failures_by_check;
  std::map<std::string, std::size_t> informational_passed;
  std::map<std::string, std::size_t> informational_total;

  bool all_passed() const { return passed == instances; }
};

/// Instance i is drawn from a generator seeded with combine_seed(seed, i).
SuiteReport run_theorem_suite(Theorem theorem, std::size_t instances, std::uint64_t seed);

void to_json(nlohmann::json& j, const BoundInstance& instance);
void to_json(nlohmann::json& j, const BoundReport& report);
void to_json(nlohmann::json& j, const SuiteReport& report);

}  // namespace gtt
