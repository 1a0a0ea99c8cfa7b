#include "gtt/analytics/scores.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gtt/common/errors.hpp"

namespace gtt {

namespace {

[[noreturn]] void throw_missing(const std::vector<std::string>& missing) {
  std::ostringstream os;
  os << "missing cells:";
  for (const auto& m : missing) os << ' ' << m;
  throw EstimationError(os.str());
}

}  // namespace

std::string_view to_string(SelfPool p) { return p == SelfPool::kPooled ? "pooled" : "self_pair_cell"; }

SelfPool self_pool_from_string(std::string_view s) {
  if (s == "self_pair_cell") return SelfPool::kSelfPairCell;
  if (s == "pooled") return SelfPool::kPooled;
  throw ConfigError("unknown self pool: " + std::string(s));
}

ScoreTable turing_scores(const std::vector<std::string>& models, const BranchProbabilities& probs) {
  if (models.size() < 2) throw EstimationError("turing scores need at least two models");
  std::vector<std::string> missing;
  for (const auto& a : models) {
    if (!probs.self.contains(a)) missing.push_back(a + "/" + a);
    for (const auto& b : models) {
      if (a != b && !probs.imit.contains({a, b})) missing.push_back(a + "->" + b);
    }
  }
  if (!missing.empty()) throw_missing(missing);

  ScoreTable out;
  out.universe = models.size();
  const double others = static_cast<double>(models.size() - 1);
  for (const auto& a : models) {
    double fool = 0.0;
    double judged = 0.0;
    for (const auto& b : models) {
      if (a == b) continue;
      fool += 1.0 - probs.imit.at({a, b});
      judged += probs.imit.at({b, a});
    }
    ScoreRow row{a, fool / others, 0.5 * probs.self.at(a) + 0.5 * judged / others, 0.0};
    row.turing = 0.5 * row.fooling + 0.5 * row.distinguishing;
    out.rows.push_back(row);
  }
  return out;
}

ScoreTable turing_scores(const CountTable& table, SelfPool pool) {
  BranchProbabilities probs;
  std::vector<std::string> missing;
  for (const auto& a : table.models) {
    BranchCounts self;
    if (pool == SelfPool::kSelfPairCell) {
      if (const auto* c = table.find({a, a, a})) self = *c;
    } else {
      for (const auto& [key, c] : table.cells) {
        if (key.target == a && key.distinguisher == a) self += c;
      }
    }
    if (self.n_self() == 0) {
      missing.push_back(a + "/" + a + "(self)");
    } else {
      probs.self[a] = static_cast<double>(self.target_said_1) / static_cast<double>(self.n_self());
    }
    for (const auto& b : table.models) {
      if (a == b) continue;
      const auto* c = table.find({a, b, b});
      if (!c || c->n_imit() == 0) {
        missing.push_back(a + "->" + b);
        continue;
      }
      probs.imit[{a, b}] = static_cast<double>(c->imit_said_0) / static_cast<double>(c->n_imit());
    }
  }
  if (!missing.empty()) throw_missing(missing);
  ScoreTable out = turing_scores(table.models, probs);
  out.self_pool = std::string(to_string(pool));
  return out;
}

std::vector<FdScoreRow> fd_turing_scores(const std::string& d, const std::vector<std::string>& models,
                                         const std::map<std::pair<std::string, std::string>, double>& q) {
  if (models.size() < 3) throw EstimationError("fixed-distinguisher scores need at least three models");
  std::vector<std::string> missing;
  for (const auto& x : models) {
    for (const auto& y : models) {
      if (x != y && x != d && y != d && !q.contains({x, y})) missing.push_back(d + ":" + x + "->" + y);
    }
  }
  if (!missing.empty()) throw_missing(missing);

  const double others = static_cast<double>(models.size() - 2);
  std::vector<FdScoreRow> rows;
  for (const auto& a : models) {
    if (a == d) continue;
    double fool = 0.0;
    double resist = 0.0;
    for (const auto& c : models) {
      if (c == a || c == d) continue;
      fool += q.at({a, c});
      resist += 1.0 - q.at({c, a});
    }
    FdScoreRow row{d, a, fool / others, resist / others, 0.0};
    row.turing = 0.5 * row.fooling + 0.5 * row.resistance;
    rows.push_back(row);
  }
  return rows;
}

std::vector<FdScoreRow> fd_turing_scores(const CountTable& table, const std::string& d) {
  std::set<std::string> seen;
  std::map<std::pair<std::string, std::string>, double> q;
  for (const auto& [key, c] : table.cells) {
    if (key.distinguisher != d || !key.fixed() || c.n_imit() == 0) continue;
    seen.insert(key.actor);
    seen.insert(key.target);
    q[{key.actor, key.target}] = static_cast<double>(c.imit_said_1) / static_cast<double>(c.n_imit());
  }
  std::vector<std::string> models;
  for (const auto& m : table.models) {
    if (m == d || seen.contains(m)) models.push_back(m);
  }
  if (std::find(models.begin(), models.end(), d) == models.end()) models.push_back(d);
  return fd_turing_scores(d, models, q);
}

std::vector<std::string> fixed_distinguishers(const CountTable& table) {
  std::set<std::string> out;
  for (const auto& [key, c] : table.cells) {
    if (key.fixed()) out.insert(key.distinguisher);
  }
  return {out.begin(), out.end()};
}

void to_json(nlohmann::json& j, const ScoreRow& r) {
  j = {{"model", r.model}, {"F", r.fooling}, {"D", r.distinguishing}, {"T", r.turing}};
}

void to_json(nlohmann::json& j, const ScoreTable& t) {
  j = {{"universe", t.universe}, {"self_pool", t.self_pool}, {"rows", t.rows}};
}

void to_json(nlohmann::json& j, const FdScoreRow& r) {
  j = {{"distinguisher", r.distinguisher}, {"model", r.model}, {"F_D", r.fooling}, {"R_D", r.resistance},
       {"T_D", r.turing}};
}

}  // namespace gtt
