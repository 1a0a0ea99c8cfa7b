#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "gtt/theory/bounds.hpp"
#include "gtt/theory/builders.hpp"
#include "gtt/theory/distance.hpp"
#include "gtt/theory/exact.hpp"
#include "support/support.hpp"

namespace gtt {
namespace {

TabularPolicy point(const std::vector<std::pair<Dialogue, std::string>>& rows) {
  TabularPolicy p;
  for (const auto& [ctx, sym] : rows) p.set_row(ctx, {{sym, 1.0}});
  return p;
}

// Direct recomputation of the unnormalised L1 sum.
double brute_l1(const TabularPolicy& p, const TabularPolicy& q, const ContextDistribution& d) {
  double total = 0.0;
  for (const auto& [ctx, w] : d) {
    std::map<std::string, double> diff;
    for (const auto& o : p.row(ctx)) diff[o.symbol] += o.probability;
    for (const auto& o : q.row(ctx)) diff[o.symbol] -= o.probability;
    double s = 0.0;
    for (const auto& [sym, v] : diff) s += std::abs(v);
    total += w * s;
  }
  return total;
}

ContextDistribution random_contexts(std::mt19937_64& rng, const std::vector<Dialogue>& ctxs) {
  std::vector<double> w(ctxs.size());
  double total = 0.0;
  for (auto& x : w) total += x = unit_uniform(rng) + 1e-3;
  ContextDistribution out;
  for (std::size_t i = 0; i < ctxs.size(); ++i) out.emplace_back(ctxs[i], w[i] / total);
  return out;
}

TEST(L1Distance, IdentityAndDisjointSupport) {
  const TabularPolicy p = point({{{"c"}, "x"}, {{"d"}, "x"}});
  const TabularPolicy q = point({{{"c"}, "y"}, {{"d"}, "z"}});
  const ContextDistribution d{{{"c"}, 0.5}, {{"d"}, 0.5}};
  EXPECT_DOUBLE_EQ(l1_distance(p, p, d), 0.0);
  EXPECT_DOUBLE_EQ(l1_distance(p, q, d), 2.0);
}

TEST(L1Distance, DomainErrors) {
  const TabularPolicy p = point({{{"c"}, "x"}});
  EXPECT_THROW(l1_distance(p, p, {{{"zz"}, 1.0}}), DomainError);
  EXPECT_THROW(l1_distance(p, p, {{{"c"}, 0.5}}), DomainError);
}

TEST(L1Distance, TriangleInequalityAndSymmetryOnRandomTriples) {
  std::mt19937_64 rng(2718);
  const Symbols symbols = make_symbols(3);
  const auto ctxs = sequences(symbols, 1);
  for (int i = 0; i < 500; ++i) {
    const TabularPolicy a = random_responder(rng, symbols, 1);
    const TabularPolicy b = random_responder(rng, symbols, 1);
    const TabularPolicy c = random_responder(rng, symbols, 1);
    const ContextDistribution d = random_contexts(rng, ctxs);
    const double ab = l1_distance(a, b, d), bc = l1_distance(b, c, d), ac = l1_distance(a, c, d);
    EXPECT_NEAR(ab, brute_l1(a, b, d), 1e-12);
    EXPECT_NEAR(ab, l1_distance(b, a, d), 1e-15);
    EXPECT_LE(ac, ab + bc + 1e-12);
  }
}

TEST(ExactGtt, IdenticalActorAndTargetGiveOneHalf) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    GameTables g = testing::random_oracle_game(rng);
    g.query_cap = 0;
    g.imitator = g.target_self;
    EXPECT_NEAR(exact_gtt_success(g), 0.5, 1e-12);
  }
}

TEST(ExactGtt, PerfectSeparationGivesOne) {
  GameTables g;
  g.horizon = 2;
  g.distinguisher = MixedPolicy(point({{{}, "q"}, {{"q", "a"}, std::string(kVerdictSame)}, {{"q", "b"}, std::string(kVerdictDifferent)}}));
  g.target_self = MixedPolicy(point({{{"q"}, "a"}}));
  g.imitator = MixedPolicy(point({{{"q"}, "b"}}));
  const ExactBranches e = exact_branches(g);
  EXPECT_DOUBLE_EQ(e.s_self, 1.0);
  EXPECT_DOUBLE_EQ(e.s_imit, 1.0);
  EXPECT_DOUBLE_EQ(e.success(), 1.0);
}

TEST(ExactGtt, NonTerminatingDistinguisherIsHorizonError) {
  GameTables g;
  g.horizon = 2;
  g.distinguisher = MixedPolicy(point({{{}, "q"}, {{"q", "a"}, "q"}}));
  g.target_self = MixedPolicy(point({{{"q"}, "a"}}));
  g.imitator = g.target_self;
  EXPECT_THROW(exact_branches(g), HorizonError);
}

TabularPolicy relabel(const TabularPolicy& p, const std::map<std::string, std::string>& m) {
  auto map = [&](const std::string& s) {
    const auto it = m.find(s);
    return it == m.end() ? s : it->second;
  };
  TabularPolicy out(p.depth());
  for (const auto& [key, row] : p.rows()) {
    Dialogue ctx = TabularPolicy::split(key);
    for (auto& s : ctx) s = map(s);
    Row r;
    for (const auto& o : row) r.push_back({map(o.symbol), o.probability});
    out.set_row(ctx, r);
  }
  return out;
}

TEST(ExactGtt, InvariantUnderAlphabetRelabeling) {
  std::mt19937_64 rng(31);
  const std::map<std::string, std::string> swap{{"a", "b"}, {"b", "c"}, {"c", "a"}};
  auto f = [&](const TabularPolicy& p) { return relabel(p, swap); };
  for (int i = 0; i < 25; ++i) {
    const GameTables g = testing::random_oracle_game(rng);
    GameTables h = g;
    h.distinguisher = map_components(g.distinguisher, f);
    h.target_self = map_components(g.target_self, f);
    h.imitator = map_components(g.imitator, f);
    const ExactBranches x = exact_branches(g), y = exact_branches(h);
    EXPECT_NEAR(x.s_self, y.s_self, 1e-12);
    EXPECT_NEAR(x.s_imit, y.s_imit, 1e-12);
  }
}

TEST(ExactGtt, AgreesWithSmallMonteCarlo) {
  std::mt19937_64 rng(404);
  for (int i = 0; i < 4; ++i) {
    const GameTables g = testing::random_oracle_game(rng);
    const double p = exact_gtt_success(g);
    constexpr std::size_t n = 20000;
    const auto mc = testing::simulate_game(g, n, 1000 + i);
    const double se = std::sqrt(p * (1 - p) / n);
    EXPECT_LE(std::abs(mc.p_hat() - p), 4 * se + 1e-9) << "game " << i << " exact " << p;
  }
}

TEST(VerifyBound, T4NearOneZetaCorollary) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    const BoundReport r = verify_bound(random_t4_instance(rng, 0.99));
    const auto it = std::find_if(r.checks.begin(), r.checks.end(), [](const BoundCheck& c) { return c.name == "corollary_rhs"; });
    ASSERT_NE(it, r.checks.end());
    EXPECT_TRUE(it->holds);
    const double alpha = r.values.at("alpha"), beta = r.values.at("beta");
    EXPECT_NEAR(r.values.at("rhs_stated"), 0.5 * (1 / 0.99 - 1) + 0.99 * alpha - beta, 1e-12);
  }
}

TEST(VerifyBound, T3EpsilonParameterisation) {
  for (double eps : {0.2, 0.4}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(eps * 100));
    for (int i = 0; i < 20; ++i) {
      const T3Instance inst = random_t3_epsilon_instance(rng, eps);
      EXPECT_LE(*inst.alpha, eps * eps / 4 + 1e-15);
      EXPECT_LE(*inst.beta, eps / 4 + 1e-15);
      EXPECT_LE(inst.gamma, eps / 4 + 1e-15);
      EXPECT_LE(inst.delta, eps / 4 + 1e-15);
      EXPECT_GE(inst.zeta, eps - 1e-15);
      const BoundReport r = verify_bound(inst);
      EXPECT_TRUE(r.holds()) << nlohmann::json(r).dump();
      EXPECT_LE(r.values.at("d_ac"), eps + kBoundTolerance);
    }
  }
}

TEST(VerifyBound, T2IgnoringActorQueriesChangeNothing) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const T2Instance inst = random_t2_instance(rng, 0.0);
    const BoundReport r = verify_bound(inst);
    EXPECT_TRUE(r.holds());
    EXPECT_NEAR(r.values.at("d_q"), r.values.at("d"), 1e-12);
  }
}

TEST(VerifyBound, HypothesisViolationsAreRejected) {
  std::mt19937_64 rng(3);
  T3Instance bad = random_t3_instance(rng);
  bad.gamma = 1.5;
  EXPECT_THROW(verify_bound(bad), HypothesisError);

  T2Instance t2 = random_t2_instance(rng);
  t2.eps2 = -0.1;
  EXPECT_THROW(verify_bound(t2), HypothesisError);
}

TEST(TheoremSuite, SmallRunsPass) {
  for (Theorem t : {Theorem::kP1, Theorem::kT2, Theorem::kT3}) {
    const SuiteReport r = run_theorem_suite(t, 30, 99);
    EXPECT_TRUE(r.all_passed()) << to_string(t) << ": " << nlohmann::json(r).dump();
    EXPECT_EQ(r.rejected, 0u);
  }
}

TEST(TheoremSuite, T4DerivedBoundHoldsEverywhere) {
  const SuiteReport r = run_theorem_suite(Theorem::kT4, 30, 99);
  EXPECT_EQ(r.rejected, 0u);
  EXPECT_EQ(r.informational_passed.at("fd_transitivity_derived"), r.informational_total.at("fd_transitivity_derived"));
}

TEST(TheoremSuite, IsDeterministicPerSeed) {
  const nlohmann::json a = run_theorem_suite(Theorem::kT3, 10, 5);
  const nlohmann::json b = run_theorem_suite(Theorem::kT3, 10, 5);
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace gtt
