#include "gtt/theory/exact.hpp"

#include <vector>

#include "gtt/protocol/answer.hpp"

namespace gtt {
namespace {

struct Verdicts {
  double one = 0.0;
  double zero = 0.0;
};

struct MainPhase {
  const TabularPolicy& distinguisher;
  const TabularPolicy& interlocutor;
  std::size_t horizon;
  Verdicts out;

  // `main` is the distinguisher's dialogue; `context` the interlocutor's,
  // which also carries any query-stage transcript in front.
  void step(Dialogue& main, Dialogue& context, std::size_t turn, double weight) {
    for (const auto& o : distinguisher.row(main)) {
      if (o.probability <= 0.0) continue;
      const double w = weight * o.probability;
      const ParsedAnswer parsed = parse_answer(o.symbol, turn == 1);
      if (parsed.analyzable()) {
        (*parsed.bit == 1 ? out.one : out.zero) += w;
        continue;
      }
      if (turn >= horizon) {
        throw HorizonError("distinguisher has no verdict after " + std::to_string(horizon) + " turns");
      }
      main.push_back(o.symbol);
      context.push_back(o.symbol);
      for (const auto& r : interlocutor.row(context)) {
        if (r.probability <= 0.0) continue;
        main.push_back(r.symbol);
        context.push_back(r.symbol);
        step(main, context, turn + 1, w * r.probability);
        main.pop_back();
        context.pop_back();
      }
      main.pop_back();
      context.pop_back();
    }
  }
};

Verdicts play(const TabularPolicy& distinguisher, const TabularPolicy& interlocutor, const Dialogue& prefix,
              std::size_t horizon) {
  MainPhase phase{distinguisher, interlocutor, horizon, {}};
  Dialogue main;
  Dialogue context = prefix;
  phase.step(main, context, 1, 1.0);
  return phase.out;
}

// Distribution over complete query-stage transcripts as the actor sees them.
void query_stage(const TabularPolicy& actor, const TabularPolicy& specimen, std::size_t cap, Dialogue& transcript,
                 std::size_t replies, double weight, std::vector<std::pair<Dialogue, double>>& out) {
  for (const auto& q : actor.row(transcript)) {
    if (q.probability <= 0.0) continue;
    const double w = weight * q.probability;
    transcript.push_back(q.symbol);
    if (is_stop_message(q.symbol)) {
      out.emplace_back(transcript, w);
    } else {
      for (const auto& r : specimen.row(transcript)) {
        if (r.probability <= 0.0) continue;
        transcript.push_back(r.symbol);
        if (replies + 1 >= cap) {
          out.emplace_back(transcript, w * r.probability);
        } else {
          query_stage(actor, specimen, cap, transcript, replies + 1, w * r.probability, out);
        }
        transcript.pop_back();
      }
    }
    transcript.pop_back();
  }
}

}  // namespace

ExactBranches exact_branches(const GameTables& game) {
  if (game.horizon < 1) throw DomainError("horizon must be >= 1");
  ExactBranches result;
  const Dialogue empty;

  for (const auto& [wd, dist] : game.distinguisher.components()) {
    if (wd <= 0.0) continue;
    for (const auto& [wt, target] : game.target_self.components()) {
      if (wt <= 0.0) continue;
      result.s_self += wd * wt * play(dist, target, empty, game.horizon).one;
    }
  }

  const MixedPolicy& specimen = game.specimen ? *game.specimen : game.target_self;
  for (const auto& [wa, actor] : game.imitator.components()) {
    if (wa <= 0.0) continue;
    std::vector<std::pair<Dialogue, double>> prefixes;
    if (game.query_cap == 0) {
      prefixes.emplace_back(Dialogue{}, 1.0);
    } else {
      for (const auto& [ws, spec] : specimen.components()) {
        if (ws <= 0.0) continue;
        Dialogue transcript;
        query_stage(actor, spec, game.query_cap, transcript, 0, ws, prefixes);
      }
    }
    for (const auto& [wd, dist] : game.distinguisher.components()) {
      if (wd <= 0.0) continue;
      for (const auto& [prefix, wp] : prefixes) {
        result.s_imit += wa * wd * wp * play(dist, actor, prefix, game.horizon).zero;
      }
    }
  }
  return result;
}

}  // namespace gtt
