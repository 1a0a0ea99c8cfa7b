#include "gtt/analytics/estimate.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "gtt/common/errors.hpp"
#include "gtt/protocol/types.hpp"

namespace gtt {

BranchCounts& BranchCounts::operator+=(const BranchCounts& o) {
  imit_said_0 += o.imit_said_0;
  imit_said_1 += o.imit_said_1;
  target_said_1 += o.target_said_1;
  target_said_0 += o.target_said_0;
  unparseable += o.unparseable;
  opening += o.opening;
  return *this;
}

const BranchCounts* CountTable::find(const CellKey& key) const {
  const auto it = cells.find(key);
  return it == cells.end() ? nullptr : &it->second;
}

void CountTable::add(const TrialRecord& r) {
  if (r.failed()) return;
  const auto& v = r.config.variant;
  BranchCounts& c = cells[{v.actor, v.target, v.distinguisher_model()}];
  if (!r.parsed.analyzable()) {
    ++c.unparseable;
    return;
  }
  if (r.parsed.kind == ParsedAnswer::Kind::kOpening) ++c.opening;
  const bool said_1 = *r.parsed.bit == 1;
  if (r.secret == SecretIdentity::kTarget) {
    ++(said_1 ? c.target_said_1 : c.target_said_0);
  } else {
    ++(said_1 ? c.imit_said_1 : c.imit_said_0);
  }
}

double binomial_se(double p_hat, std::size_t n, bool combined) {
  if (n == 0) throw DomainError("binomial_se needs n >= 1");
  const double nd = static_cast<double>(n);
  if (combined) return 1.0 / std::sqrt(8.0 * nd);
  if (p_hat < 0.0 || p_hat > 1.0) throw DomainError("binomial_se: proportion outside [0, 1]");
  return std::sqrt(p_hat * (1.0 - p_hat) / nd);
}

PairEstimate estimate_pair(const BranchCounts& c) {
  if (c.n_self() == 0) throw EstimationError("self branch (secret=target) has no analyzable trials");
  if (c.n_imit() == 0) throw EstimationError("imitation branch (secret=imitator) has no analyzable trials");
  PairEstimate e;
  e.n_self = c.n_self();
  e.n_imit = c.n_imit();
  e.s_hat_self = static_cast<double>(c.target_said_1) / static_cast<double>(e.n_self);
  e.s_hat_imit = static_cast<double>(c.imit_said_0) / static_cast<double>(e.n_imit);
  e.p_hat = 0.5 * e.s_hat_imit + 0.5 * e.s_hat_self;
  e.d_hat = e.p_hat - 0.5;
  const double se_self = binomial_se(e.s_hat_self, e.n_self);
  const double se_imit = binomial_se(e.s_hat_imit, e.n_imit);
  e.se = 0.5 * std::sqrt(se_self * se_self + se_imit * se_imit);
  e.se_bound = 0.25 * std::sqrt(1.0 / static_cast<double>(e.n_self) + 1.0 / static_cast<double>(e.n_imit));
  return e;
}

void to_json(nlohmann::json& j, const BranchCounts& c) {
  j = {{"imit_said_0", c.imit_said_0},     {"imit_said_1", c.imit_said_1}, {"target_said_1", c.target_said_1},
       {"target_said_0", c.target_said_0}, {"unparseable", c.unparseable}, {"opening", c.opening}};
}

void from_json(const nlohmann::json& j, BranchCounts& c) {
  c.imit_said_0 = j.value("imit_said_0", std::size_t{0});
  c.imit_said_1 = j.value("imit_said_1", std::size_t{0});
  c.target_said_1 = j.value("target_said_1", std::size_t{0});
  c.target_said_0 = j.value("target_said_0", std::size_t{0});
  c.unparseable = j.value("unparseable", std::size_t{0});
  c.opening = j.value("opening", std::size_t{0});
}

void to_json(nlohmann::json& j, const PairEstimate& e) {
  j = {{"s_hat_self", e.s_hat_self}, {"s_hat_imit", e.s_hat_imit}, {"p_hat", e.p_hat}, {"d_hat", e.d_hat},
       {"n_self", e.n_self},         {"n_imit", e.n_imit},         {"se", e.se},       {"se_bound", e.se_bound}};
}

}  // namespace gtt
