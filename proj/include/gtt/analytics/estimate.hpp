#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gtt {

struct TrialRecord;

/// Verdict tallies of one cell. Opening answers are counted in their
/// branch by bit and tallied again in `opening`.
struct BranchCounts {
  std::size_t imit_said_0 = 0;
  std::size_t imit_said_1 = 0;
  std::size_t target_said_1 = 0;
  std::size_t target_said_0 = 0;
  std::size_t unparseable = 0;
  std::size_t opening = 0;

  std::size_t n_self() const { return target_said_1 + target_said_0; }
  std::size_t n_imit() const { return imit_said_0 + imit_said_1; }
  std::size_t analyzable() const { return n_self() + n_imit(); }

  BranchCounts& operator+=(const BranchCounts& o);
  bool operator==(const BranchCounts&) const = default;
};

/// One ordered game: `actor` imitates `target`, judged by `distinguisher`
/// (the target itself unless fixed).
struct CellKey {
  std::string actor;
  std::string target;
  std::string distinguisher;

  bool fixed() const { return distinguisher != target; }
  auto operator<=>(const CellKey&) const = default;
};

struct CountTable {
  std::vector<std::string> models;
  std::map<CellKey, BranchCounts> cells;

  const BranchCounts* find(const CellKey& key) const;
  /// Adds a finished record; failed records are ignored.
  void add(const TrialRecord& record);
};

struct PairEstimate {
  double s_hat_self = 0.0;
  double s_hat_imit = 0.0;
  double p_hat = 0.0;
  double d_hat = 0.0;
  std::size_t n_self = 0;
  std::size_t n_imit = 0;
  /// Independence approximation with the observed proportions.
  double se = 0.0;
  /// Worst case of `se` over all proportions; 1/sqrt(8n) for equal branches.
  double se_bound = 0.0;
};

/// Throws EstimationError naming an empty branch.
PairEstimate estimate_pair(const BranchCounts& counts);

/// Single branch: sqrt(p(1-p)/n). Combined: the two-branch worst case
/// 1/sqrt(8n), independent of p.
double binomial_se(double p_hat, std::size_t n, bool combined = false);

void to_json(nlohmann::json& j, const BranchCounts& c);
void from_json(const nlohmann::json& j, BranchCounts& c);
void to_json(nlohmann::json& j, const PairEstimate& e);

}  // namespace gtt
