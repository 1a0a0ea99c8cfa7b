#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gtt {

/// Output symbols a tabular distinguisher uses for its verdict. They are the
/// literal answer tags so that verdicts parse exactly as model output does.
inline constexpr std::string_view kVerdictSame = "<answer>1</answer>";
inline constexpr std::string_view kVerdictDifferent = "<answer>0</answer>";
inline constexpr std::string_view kStopSymbol = "STOP";

inline constexpr double kRowTolerance = 1e-9;

struct Outcome {
  std::string symbol;
  double probability = 0.0;
  bool operator==(const Outcome&) const = default;
};

using Row = std::vector<Outcome>;
using Dialogue = std::vector<std::string>;

/// Finite next-message distribution keyed by the last `depth` dialogue
/// payloads (depth 0 keys on the full dialogue).
class TabularPolicy {
 public:
  explicit TabularPolicy(std::size_t depth = 0) : depth_(depth) {}

  std::size_t depth() const { return depth_; }

  /// Throws DomainError when the row does not sum to 1 within kRowTolerance
  /// or has a negative entry.
  void set_row(const Dialogue& context, Row row);
  void set_row_key(std::string key, Row row);

  /// Throws DomainError for contexts outside the table.
  const Row& row(const Dialogue& dialogue) const;
  const Row* find(const Dialogue& dialogue) const;

  std::string key(const Dialogue& dialogue) const;
  static std::string join(const Dialogue& parts);
  static Dialogue split(std::string_view key);

  const std::map<std::string, Row>& rows() const { return rows_; }
  bool operator==(const TabularPolicy&) const = default;

 private:
  std::size_t depth_;
  std::map<std::string, Row> rows_;
};

/// Mixture over whole-trajectory policies. The component is drawn once per
/// instance, so each sampled conversation follows a single table.
class MixedPolicy {
 public:
  MixedPolicy() = default;
  MixedPolicy(TabularPolicy single);
  MixedPolicy(std::vector<std::pair<double, TabularPolicy>> components);

  const std::vector<std::pair<double, TabularPolicy>>& components() const { return components_; }
  bool empty() const { return components_.empty(); }

  /// Component index chosen by the instance seed.
  std::size_t choose(std::uint64_t instance_seed) const;

  /// Weighted mixture of two mixtures: `w` on this, `1 - w` on `other`.
  MixedPolicy blend(double w, const MixedPolicy& other) const;

 private:
  std::vector<std::pair<double, TabularPolicy>> components_;
};

void check_row(const Row& row);

/// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng);

/// Draws from the row using one uniform variate from `rng`.
const std::string& sample_row(const Row& row, std::mt19937_64& rng);

std::string sample_tabular(const TabularPolicy& policy, const Dialogue& dialogue, std::mt19937_64& rng);

/// Generator for call `call_index` of an instance, independent of other calls.
std::mt19937_64 call_rng(std::uint64_t instance_seed, std::size_t call_index);

void to_json(nlohmann::json& j, const TabularPolicy& p);
void from_json(const nlohmann::json& j, TabularPolicy& p);
void to_json(nlohmann::json& j, const MixedPolicy& p);
void from_json(const nlohmann::json& j, MixedPolicy& p);

}  // namespace gtt
