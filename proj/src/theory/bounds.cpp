#include "gtt/theory/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gtt/common/util.hpp"
#include "gtt/theory/builders.hpp"

namespace gtt {
namespace {

const Dialogue& imitation_prefix() {
  static const Dialogue kPrefix{std::string(kImitateC), std::string(kAck)};
  return kPrefix;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

BoundCheck check(std::string name, double lhs, double rhs) {
  return {std::move(name), lhs, rhs, lhs <= rhs + kBoundTolerance};
}

void require(bool ok, const std::string& hypothesis) {
  if (!ok) throw HypothesisError("hypothesis violated: " + hypothesis);
}

void require_unit(double x, const std::string& name) {
  require(x >= 0.0 && x <= 1.0, name + " in [0,1]");
}

// Declared parameter, or the tightest admissible value for the measurement.
double parameter(const std::optional<double>& declared, double measured, const std::string& name) {
  if (!declared) return std::max(0.0, measured);
  require(*declared >= 0.0, name + " >= 0");
  require(measured <= *declared + kBoundTolerance, name + " bounds the measured advantage");
  return *declared;
}

TabularPolicy shift_distinguisher(const TabularPolicy& p) {
  TabularPolicy opening;
  opening.set_row({}, {{std::string(kImitateC), 1.0}});
  return merge(opening, prefixed(p, imitation_prefix()));
}

TabularPolicy shift_responder(const TabularPolicy& p) {
  TabularPolicy ack;
  ack.set_row({std::string(kImitateC)}, {{std::string(kAck), 1.0}});
  return merge(ack, prefixed(p, imitation_prefix()));
}

MixedPolicy unshift(const MixedPolicy& m) {
  return map_components(m, [](const TabularPolicy& p) { return strip_prefix(p, imitation_prefix()); });
}

MixedPolicy ignoring_actor(const T2Instance& inst) {
  const auto transcripts = query_transcripts(make_symbols(inst.alphabet), inst.query_cap);
  return map_components(inst.actor, [&](const TabularPolicy& p) {
    TabularPolicy out = inst.ignoring_queries;
    for (const auto& t : transcripts) out = merge(out, prefixed(p, t));
    return out;
  });
}

BoundReport verify_p1(const P1Instance& inst) {
  BoundReport r;
  r.theorem = Theorem::kP1;
  const double ab = l1_distance(inst.a, inst.b, inst.contexts);
  const double bc = l1_distance(inst.b, inst.c, inst.contexts);
  const double ac = l1_distance(inst.a, inst.c, inst.contexts);
  r.values = {{"delta_ab", ab}, {"delta_bc", bc}, {"delta_ac", ac}};
  r.checks.push_back(check("triangle", ac, ab + bc));
  return r;
}

BoundReport verify_t2(const T2Instance& inst) {
  require_unit(inst.eps2, "eps2");
  require(inst.query_cap >= 1, "query stage allows at least one round");
  BoundReport r;
  r.theorem = Theorem::kT2;
  const double d = exact_branches(t2_plain_game(inst)).advantage();
  const double dq = exact_branches(t2_querying_game(inst)).advantage();
  const double eps1 = parameter(inst.eps1, d, "eps1");
  r.values = {{"d", d}, {"d_q", dq}, {"eps1", eps1}, {"eps2", inst.eps2}};
  r.checks.push_back(check("querying_bound", dq, eps1 + 0.5 * inst.eps2));
  if (inst.eps2 == 0.0) {
    r.checks.push_back(check("no_deviation_equality", std::abs(dq - d), 0.0));
  }
  return r;
}

BoundReport verify_t3(const T3Instance& inst) {
  require(inst.zeta > 0.0 && inst.zeta <= 1.0, "zeta in (0,1]");
  require_unit(inst.gamma, "gamma");
  require_unit(inst.delta, "delta");
  const double plain = exact_branches(t3_plain_game(inst)).advantage();
  require(plain >= -kBoundTolerance, "B's non-recursive distinguishing is no worse than random guessing");

  BoundReport r;
  r.theorem = Theorem::kT3;
  const double d_ab = exact_branches(t3_game(inst, TheoryPair::kAB)).advantage();
  const double d_bc = exact_branches(t3_game(inst, TheoryPair::kBC)).advantage();
  const double d_ac = exact_branches(t3_game(inst, TheoryPair::kAC)).advantage();
  const double alpha = parameter(inst.alpha, d_ab, "alpha");
  const double beta = parameter(inst.beta, d_bc, "beta");
  r.values = {{"d_ab", d_ab},   {"d_bc", d_bc},   {"d_ac", d_ac},         {"d_plain", plain},
              {"alpha", alpha}, {"beta", beta},   {"gamma", inst.gamma},  {"delta", inst.delta},
              {"zeta", inst.zeta}};
  r.checks.push_back(check("transitivity", d_ac, alpha / inst.zeta + beta + inst.gamma + inst.delta));
  if (inst.epsilon) {
    const double eps = *inst.epsilon;
    require(alpha <= eps * eps / 4 + kBoundTolerance, "alpha <= eps^2/4");
    require(beta <= eps / 4 + kBoundTolerance, "beta <= eps/4");
    require(inst.gamma <= eps / 4 + kBoundTolerance, "gamma <= eps/4");
    require(inst.delta <= eps / 4 + kBoundTolerance, "delta <= eps/4");
    require(inst.zeta >= eps - kBoundTolerance, "zeta >= eps");
    r.values["epsilon"] = eps;
    r.checks.push_back(check("epsilon_form", d_ac, eps));
  }
  return r;
}

BoundReport verify_t4(const T4Instance& inst) {
  require(inst.zeta > 0.0 && inst.zeta <= 1.0, "zeta in (0,1]");
  BoundReport r;
  r.theorem = Theorem::kT4;
  const double d_ab = exact_branches(t4_game(inst, TheoryPair::kAB)).advantage();
  const double d_bc = exact_branches(t4_game(inst, TheoryPair::kBC)).advantage();
  const double d_ac = exact_branches(t4_game(inst, TheoryPair::kAC)).advantage();
  const double alpha = parameter(inst.alpha, d_ab, "alpha");
  const double beta = parameter(inst.beta, d_bc, "beta");
  const double z = inst.zeta;
  const double stated = 0.5 * (1.0 / z - 1.0) + z * alpha - beta;
  const double derived = 0.5 * (1.0 / z - 1.0) + alpha / z + beta;
  r.values = {{"d_ab", d_ab},   {"d_bc", d_bc},  {"d_ac", d_ac},          {"alpha", alpha},
              {"beta", beta},   {"zeta", z},     {"rhs_stated", stated}, {"rhs_derived", derived}};
  r.checks.push_back(check("fd_transitivity", d_ac, stated));
  if (z >= 0.99) {
    r.checks.push_back(check("corollary_rhs", stated, 0.01 + alpha - beta));
  }
  r.informational.push_back(check("fd_transitivity_derived", d_ac, derived));
  return r;
}

std::size_t alphabet_size(std::mt19937_64& rng) { return 2 + rng() % 2; }

MixedPolicy mixture_of_responders(std::mt19937_64& rng, const Symbols& s, std::size_t length,
                                  const std::vector<Dialogue>& prefixes = {Dialogue{}}) {
  return random_mixture(rng, 2, [&] { return random_responder(rng, s, length, prefixes); });
}

MixedPolicy mixture_of_distinguishers(std::mt19937_64& rng, const Symbols& s, std::size_t horizon) {
  return random_mixture(rng, 2, [&] { return random_distinguisher(rng, s, horizon); });
}

// B's non-recursive distinguisher, flipped when it would lose to chance.
void orient_plain_distinguisher(T3Instance& inst) {
  if (exact_branches(t3_plain_game(inst)).advantage() < 0.0) {
    inst.b_plain_distinguisher = map_components(inst.b_plain_distinguisher, flip_verdicts);
  }
}

T3Instance t3_skeleton(std::mt19937_64& rng, const Symbols& s, std::size_t h, double b_weight) {
  T3Instance inst;
  inst.horizon = h;
  const std::size_t len = responder_length(h);
  inst.c_self = mixture_of_responders(rng, s, len);
  inst.c_distinguisher = mixture_of_distinguishers(rng, s, h);
  inst.other_distinguisher = mixture_of_distinguishers(rng, s, h);
  inst.b_plain_distinguisher = mixture_of_distinguishers(rng, s, h);
  const MixedPolicy b_as_c = inst.c_self.blend(1.0 - b_weight, mixture_of_responders(rng, s, len));
  inst.b_self = product(mixture_of_responders(rng, s, len), map_components(b_as_c, shift_responder));
  inst.other_actor = mixture_of_responders(rng, s, len);
  return inst;
}

}  // namespace

std::string_view to_string(Theorem t) {
  switch (t) {
    case Theorem::kP1:
      return "P1";
    case Theorem::kT2:
      return "T2";
    case Theorem::kT3:
      return "T3";
    case Theorem::kT4:
      return "T4";
  }
  return "P1";
}

Theorem theorem_from_string(std::string_view s) {
  if (s == "P1") return Theorem::kP1;
  if (s == "T2") return Theorem::kT2;
  if (s == "T3") return Theorem::kT3;
  if (s == "T4") return Theorem::kT4;
  throw ConfigError("unknown theorem '" + std::string(s) + "' (expected P1, T2, T3 or T4)");
}

bool BoundReport::holds() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.holds; });
}

double BoundReport::worst_slack() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) worst = std::min(worst, c.slack());
  return worst;
}

GameTables t2_plain_game(const T2Instance& inst) {
  GameTables g;
  g.distinguisher = inst.target_distinguisher;
  g.target_self = inst.target_self;
  g.imitator = inst.actor;
  g.horizon = inst.horizon;
  return g;
}

GameTables t2_querying_game(const T2Instance& inst) {
  GameTables g = t2_plain_game(inst);
  g.imitator = ignoring_actor(inst).blend(1.0 - inst.eps2, inst.deviant);
  g.query_cap = inst.query_cap;
  return g;
}

GameTables t3_plain_game(const T3Instance& inst) {
  GameTables g;
  g.distinguisher = inst.b_plain_distinguisher;
  g.target_self = inst.b_self;
  g.imitator = inst.a_as_b;
  g.horizon = inst.horizon + 1;
  return g;
}

GameTables t3_game(const T3Instance& inst, TheoryPair pair) {
  GameTables g;
  g.horizon = inst.horizon;
  switch (pair) {
    case TheoryPair::kAB: {
      const MixedPolicy b_as_c_dist = inst.c_distinguisher.blend(1.0 - inst.gamma, inst.other_distinguisher);
      g.distinguisher =
          map_components(b_as_c_dist, shift_distinguisher).blend(inst.zeta, inst.b_plain_distinguisher);
      g.target_self = inst.b_self;
      g.imitator = inst.a_as_b;
      g.horizon = inst.horizon + 1;
      break;
    }
    case TheoryPair::kBC:
      g.distinguisher = inst.c_distinguisher;
      g.target_self = inst.c_self;
      g.imitator = unshift(inst.b_self);
      break;
    case TheoryPair::kAC:
      g.distinguisher = inst.c_distinguisher;
      g.target_self = inst.c_self;
      g.imitator = unshift(inst.a_as_b).blend(1.0 - inst.delta, inst.other_actor);
      break;
  }
  return g;
}

GameTables t4_game(const T4Instance& inst, TheoryPair pair) {
  GameTables g;
  g.horizon = inst.horizon;
  switch (pair) {
    case TheoryPair::kAB:
      g.distinguisher = inst.d_judging_c.blend(inst.zeta, inst.d_own_b);
      g.target_self = inst.b_self;
      g.imitator = inst.a_imitation;
      break;
    case TheoryPair::kBC:
      g.distinguisher = inst.d_judging_c;
      g.target_self = inst.c_self;
      g.imitator = inst.b_self;
      break;
    case TheoryPair::kAC:
      g.distinguisher = inst.d_judging_c;
      g.target_self = inst.c_self;
      g.imitator = inst.a_imitation;
      break;
  }
  return g;
}

BoundReport verify_bound(const BoundInstance& instance) {
  return std::visit(
      [](const auto& inst) -> BoundReport {
        using T = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<T, P1Instance>) {
          return verify_p1(inst);
        } else if constexpr (std::is_same_v<T, T2Instance>) {
          return verify_t2(inst);
        } else if constexpr (std::is_same_v<T, T3Instance>) {
          return verify_t3(inst);
        } else {
          return verify_t4(inst);
        }
      },
      instance);
}

P1Instance random_p1_instance(std::mt19937_64& rng) {
  const Symbols s = make_symbols(alphabet_size(rng));
  std::vector<Dialogue> contexts;
  for (std::size_t len = 0; len <= 2; ++len) {
    for (auto& c : sequences(s, len)) contexts.push_back(std::move(c));
  }
  auto table = [&] {
    TabularPolicy p;
    for (const auto& c : contexts) p.set_row(c, random_row(rng, s));
    return p;
  };
  P1Instance inst{table(), table(), table(), {}};
  double total = 0.0;
  for (const auto& c : contexts) {
    const double w = rng() % 3 == 0 ? 0.0 : -std::log1p(-unit_uniform(rng));
    inst.contexts.emplace_back(c, w);
    total += w;
  }
  if (total == 0.0) {
    inst.contexts.front().second = total = 1.0;
  }
  for (auto& [c, w] : inst.contexts) w /= total;
  return inst;
}

T2Instance random_t2_instance(std::mt19937_64& rng, std::optional<double> eps2) {
  T2Instance inst;
  inst.alphabet = alphabet_size(rng);
  inst.horizon = 2;
  inst.query_cap = 1 + rng() % 2;
  const Symbols s = make_symbols(inst.alphabet);
  const std::size_t len = responder_length(inst.horizon);
  inst.target_self = mixture_of_responders(rng, s, std::max(len, 2 * inst.query_cap - 1));
  inst.target_distinguisher = mixture_of_distinguishers(rng, s, inst.horizon);
  inst.actor = mixture_of_responders(rng, s, len);
  inst.ignoring_queries = random_querier(rng, s, inst.query_cap);
  const auto transcripts = query_transcripts(s, inst.query_cap);
  inst.deviant = random_mixture(rng, 2, [&] {
    return merge(random_querier(rng, s, inst.query_cap), random_responder(rng, s, len, transcripts));
  });
  inst.eps2 = eps2 ? *eps2 : unit_uniform(rng);
  return inst;
}

T3Instance random_t3_instance(std::mt19937_64& rng) {
  const Symbols s = make_symbols(alphabet_size(rng));
  const std::size_t h = 2;
  T3Instance inst = t3_skeleton(rng, s, h, unit_uniform(rng));
  const std::size_t len = responder_length(h);
  inst.a_as_b = product(mixture_of_responders(rng, s, len),
                        map_components(mixture_of_responders(rng, s, len), shift_responder));
  inst.zeta = uniform(rng, 0.05, 1.0);
  inst.gamma = uniform(rng, 0.0, 0.5);
  inst.delta = uniform(rng, 0.0, 0.5);
  orient_plain_distinguisher(inst);
  return inst;
}

T3Instance random_t3_epsilon_instance(std::mt19937_64& rng, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in (0,1]");
  const Symbols s = make_symbols(alphabet_size(rng));
  const std::size_t h = 2;
  // B-as-C deviates with weight eps/2, so d(B,C) <= eps/4
  T3Instance inst = t3_skeleton(rng, s, h, epsilon / 2);
  const std::size_t len = responder_length(h);
  const MixedPolicy stranger = product(mixture_of_responders(rng, s, len),
                                       map_components(mixture_of_responders(rng, s, len), shift_responder));
  // A-as-B deviates from B with weight eps^2/2, so d(A,B) <= eps^2/4
  inst.a_as_b = inst.b_self.blend(1.0 - epsilon * epsilon / 2, stranger);
  inst.zeta = epsilon;
  inst.gamma = epsilon / 4;
  inst.delta = epsilon / 4;
  inst.alpha = epsilon * epsilon / 4;
  inst.beta = epsilon / 4;
  inst.epsilon = epsilon;
  orient_plain_distinguisher(inst);
  return inst;
}

T4Instance random_t4_instance(std::mt19937_64& rng, std::optional<double> zeta) {
  const Symbols s = make_symbols(alphabet_size(rng));
  T4Instance inst;
  inst.horizon = 2;
  const std::size_t len = responder_length(inst.horizon);
  inst.b_self = mixture_of_responders(rng, s, len);
  inst.c_self = mixture_of_responders(rng, s, len);
  inst.a_imitation = mixture_of_responders(rng, s, len);
  inst.d_judging_c = mixture_of_distinguishers(rng, s, inst.horizon);
  inst.d_own_b = mixture_of_distinguishers(rng, s, inst.horizon);
  inst.zeta = zeta ? *zeta : uniform(rng, 0.05, 1.0);
  return inst;
}

SuiteReport run_theorem_suite(Theorem theorem, std::size_t instances, std::uint64_t seed) {
  SuiteReport out;
  out.theorem = theorem;
  out.instances = instances;
  out.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < instances; ++i) {
    std::mt19937_64 rng(combine_seed(seed, i));
    BoundInstance inst;
    switch (theorem) {
      case Theorem::kP1:
        inst = random_p1_instance(rng);
        break;
      case Theorem::kT2:
        inst = random_t2_instance(rng, i % 5 == 0 ? std::optional<double>(0.0) : std::nullopt);
        break;
      case Theorem::kT3:
        if (i % 4 == 1) {
          inst = random_t3_epsilon_instance(rng, 0.2);
        } else if (i % 4 == 3) {
          inst = random_t3_epsilon_instance(rng, 0.4);
        } else {
          inst = random_t3_instance(rng);
        }
        break;
      case Theorem::kT4:
        inst = random_t4_instance(rng, i % 2 == 1 ? std::optional<double>(0.99) : std::nullopt);
        break;
    }
    BoundReport report;
    try {
      report = verify_bound(inst);
    } catch (const HypothesisError& e) {
      ++out.rejected;
      ++out.failures_by_check["hypothesis"];
      if (!out.first_failure) out.first_failure = nlohmann::json{{"index", i}, {"error", e.what()}};
      continue;
    }
    for (const auto& c : report.checks) {
      if (c.slack() < out.worst_slack) {
        out.worst_slack = c.slack();
        out.worst_index = i;
        out.worst_check = c.name;
      }
      if (!c.holds) ++out.failures_by_check[c.name];
    }
    for (const auto& c : report.informational) {
      ++out.informational_total[c.name];
      if (c.holds) ++out.informational_passed[c.name];
    }
    if (report.holds()) {
      ++out.passed;
    } else if (!out.first_failure) {
      nlohmann::json dump;
      to_json(dump, inst);
      nlohmann::json rep;
      to_json(rep, report);
      out.first_failure = nlohmann::json{{"index", i}, {"report", rep}, {"instance", dump}};
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const BoundInstance& instance) {
  std::visit(
      [&j](const auto& inst) {
        using T = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<T, P1Instance>) {
          nlohmann::json contexts = nlohmann::json::array();
          for (const auto& [c, w] : inst.contexts) contexts.push_back({{"context", c}, {"weight", w}});
          j = {{"theorem", "P1"}, {"a", inst.a}, {"b", inst.b}, {"c", inst.c}, {"contexts", contexts}};
        } else if constexpr (std::is_same_v<T, T2Instance>) {
          j = {{"theorem", "T2"},
               {"target_self", inst.target_self},
               {"target_distinguisher", inst.target_distinguisher},
               {"actor", inst.actor},
               {"ignoring_queries", inst.ignoring_queries},
               {"deviant", inst.deviant},
               {"eps2", inst.eps2},
               {"horizon", inst.horizon},
               {"query_cap", inst.query_cap},
               {"alphabet", inst.alphabet}};
          if (inst.eps1) j["eps1"] = *inst.eps1;
        } else if constexpr (std::is_same_v<T, T3Instance>) {
          j = {{"theorem", "T3"},
               {"c_self", inst.c_self},
               {"c_distinguisher", inst.c_distinguisher},
               {"other_distinguisher", inst.other_distinguisher},
               {"b_plain_distinguisher", inst.b_plain_distinguisher},
               {"b_self", inst.b_self},
               {"a_as_b", inst.a_as_b},
               {"other_actor", inst.other_actor},
               {"zeta", inst.zeta},
               {"gamma", inst.gamma},
               {"delta", inst.delta},
               {"horizon", inst.horizon}};
          if (inst.alpha) j["alpha"] = *inst.alpha;
          if (inst.beta) j["beta"] = *inst.beta;
          if (inst.epsilon) j["epsilon"] = *inst.epsilon;
        } else {
          j = {{"theorem", "T4"},
               {"b_self", inst.b_self},
               {"c_self", inst.c_self},
               {"a_imitation", inst.a_imitation},
               {"d_judging_c", inst.d_judging_c},
               {"d_own_b", inst.d_own_b},
               {"zeta", inst.zeta},
               {"horizon", inst.horizon}};
          if (inst.alpha) j["alpha"] = *inst.alpha;
          if (inst.beta) j["beta"] = *inst.beta;
        }
      },
      instance);
}

namespace {

nlohmann::json checks_json(const std::vector<BoundCheck>& checks) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks) {
    out.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack()}, {"holds", c.holds}});
  }
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const BoundReport& report) {
  j = {{"theorem", to_string(report.theorem)},
       {"holds", report.holds()},
       {"checks", checks_json(report.checks)},
       {"informational", checks_json(report.informational)},
       {"values", report.values}};
}

void to_json(nlohmann::json& j, const SuiteReport& report) {
  j = {{"theorem", to_string(report.theorem)},
       {"instances", report.instances},
       {"passed", report.passed},
       {"rejected", report.rejected},
       {"worst_slack", report.worst_slack},
       {"worst_index", report.worst_index},
       {"worst_check", report.worst_check},
       {"failures_by_check", report.failures_by_check},
       {"informational_passed", report.informational_passed},
       {"informational_total", report.informational_total}};
  if (report.first_failure) j["first_failure"] = *report.first_failure;
}

}  // namespace gtt
