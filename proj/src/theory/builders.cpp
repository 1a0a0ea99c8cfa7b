#include "gtt/theory/builders.hpp"

#include <algorithm>
#include <cmath>

#include "gtt/common/errors.hpp"

namespace gtt {
namespace {

double exp1(std::mt19937_64& rng) { return -std::log1p(-unit_uniform(rng)); }

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += (x = exp1(rng));
  for (auto& x : w) x /= total;
  return w;
}

Row normalised(const Symbols& symbols, std::vector<double> w) {
  Row row;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) total += w[i];
  w.back() = std::max(0.0, 1.0 - total);
  for (std::size_t i = 0; i < symbols.size(); ++i) row.push_back({symbols[i], w[i]});
  return row;
}

void require_full_history(const TabularPolicy& p) {
  if (p.depth() != 0) throw DomainError("prefix operations need a full-history table");
}

}  // namespace

Symbols make_symbols(std::size_t n) {
  Symbols out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(1, static_cast<char>('a' + i));
  return out;
}

std::vector<Dialogue> sequences(const Symbols& symbols, std::size_t length) {
  std::vector<Dialogue> out{Dialogue{}};
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<Dialogue> next;
    next.reserve(out.size() * symbols.size());
    for (const auto& seq : out) {
      for (const auto& s : symbols) {
        next.push_back(seq);
        next.back().push_back(s);
      }
    }
    out = std::move(next);
  }
  return out;
}

Row random_row(std::mt19937_64& rng, const Symbols& symbols) {
  if (symbols.empty()) throw DomainError("empty alphabet");
  if (rng() % 4 == 0) {
    std::vector<double> w(symbols.size(), 0.0);
    w[rng() % symbols.size()] = 1.0;
    return normalised(symbols, std::move(w));
  }
  return normalised(symbols, dirichlet(rng, symbols.size()));
}

TabularPolicy random_distinguisher(std::mt19937_64& rng, const Symbols& symbols, std::size_t horizon,
                                   double verdict_mass) {
  TabularPolicy p;
  const Symbols verdicts{std::string(kVerdictSame), std::string(kVerdictDifferent)};
  for (std::size_t turn = 1; turn <= horizon; ++turn) {
    for (const auto& context : sequences(symbols, 2 * (turn - 1))) {
      if (turn == horizon) {
        p.set_row(context, random_row(rng, verdicts));
        continue;
      }
      const double stop = verdict_mass * unit_uniform(rng);
      Row row;
      for (auto o : random_row(rng, symbols)) {
        o.probability *= 1.0 - stop;
        row.push_back(o);
      }
      for (auto o : random_row(rng, verdicts)) {
        o.probability *= stop;
        row.push_back(o);
      }
      double total = 0.0;
      for (std::size_t i = 0; i + 1 < row.size(); ++i) total += row[i].probability;
      row.back().probability = std::max(0.0, 1.0 - total);
      p.set_row(context, std::move(row));
    }
  }
  return p;
}

TabularPolicy random_responder(std::mt19937_64& rng, const Symbols& symbols, std::size_t max_length,
                               const std::vector<Dialogue>& prefixes) {
  TabularPolicy p;
  for (const auto& prefix : prefixes) {
    for (std::size_t length = 1; length <= max_length; length += 2) {
      for (const auto& seq : sequences(symbols, length)) {
        Dialogue context = prefix;
        context.insert(context.end(), seq.begin(), seq.end());
        p.set_row(context, random_row(rng, symbols));
      }
    }
  }
  return p;
}

TabularPolicy random_querier(std::mt19937_64& rng, const Symbols& symbols, std::size_t cap) {
  Symbols with_stop = symbols;
  with_stop.emplace_back(kStopSymbol);
  TabularPolicy p;
  for (std::size_t round = 0; round < cap; ++round) {
    for (const auto& context : sequences(symbols, 2 * round)) p.set_row(context, random_row(rng, with_stop));
  }
  return p;
}

std::vector<Dialogue> query_transcripts(const Symbols& symbols, std::size_t cap) {
  std::vector<Dialogue> out;
  for (std::size_t round = 0; round < cap; ++round) {
    for (auto seq : sequences(symbols, 2 * round)) {
      seq.emplace_back(kStopSymbol);
      out.push_back(std::move(seq));
    }
  }
  for (auto& seq : sequences(symbols, 2 * cap)) out.push_back(std::move(seq));
  return out;
}

TabularPolicy prefixed(const TabularPolicy& base, const Dialogue& prefix) {
  require_full_history(base);
  TabularPolicy out;
  for (const auto& [key, row] : base.rows()) {
    Dialogue context = prefix;
    const Dialogue rest = TabularPolicy::split(key);
    context.insert(context.end(), rest.begin(), rest.end());
    out.set_row(context, row);
  }
  return out;
}

TabularPolicy strip_prefix(const TabularPolicy& base, const Dialogue& prefix) {
  require_full_history(base);
  TabularPolicy out;
  for (const auto& [key, row] : base.rows()) {
    const Dialogue context = TabularPolicy::split(key);
    if (context.size() < prefix.size() || !std::equal(prefix.begin(), prefix.end(), context.begin())) continue;
    out.set_row(Dialogue(context.begin() + static_cast<std::ptrdiff_t>(prefix.size()), context.end()), row);
  }
  return out;
}

TabularPolicy merge(const TabularPolicy& a, const TabularPolicy& b) {
  if (a.depth() != b.depth()) throw DomainError("cannot merge tables of different depth");
  TabularPolicy out = a;
  for (const auto& [key, row] : b.rows()) {
    if (a.rows().count(key)) throw DomainError("merged tables share a context");
    out.set_row_key(key, row);
  }
  return out;
}

MixedPolicy product(const MixedPolicy& a, const MixedPolicy& b) {
  std::vector<std::pair<double, TabularPolicy>> out;
  for (const auto& [wa, pa] : a.components()) {
    for (const auto& [wb, pb] : b.components()) out.emplace_back(wa * wb, merge(pa, pb));
  }
  return MixedPolicy(std::move(out));
}

MixedPolicy map_components(const MixedPolicy& m, const std::function<TabularPolicy(const TabularPolicy&)>& f) {
  std::vector<std::pair<double, TabularPolicy>> out;
  for (const auto& [w, p] : m.components()) out.emplace_back(w, f(p));
  return MixedPolicy(std::move(out));
}

TabularPolicy flip_verdicts(const TabularPolicy& p) {
  TabularPolicy out(p.depth());
  for (const auto& [key, row] : p.rows()) {
    Row flipped = row;
    for (auto& o : flipped) {
      if (o.symbol == kVerdictSame) {
        o.symbol = kVerdictDifferent;
      } else if (o.symbol == kVerdictDifferent) {
        o.symbol = kVerdictSame;
      }
    }
    out.set_row_key(key, std::move(flipped));
  }
  return out;
}

MixedPolicy random_mixture(std::mt19937_64& rng, std::size_t max_components,
                           const std::function<TabularPolicy()>& make) {
  const std::size_t n = 1 + rng() % std::max<std::size_t>(1, max_components);
  if (n == 1) return MixedPolicy(make());
  auto w = dirichlet(rng, n);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) total += w[i];
  w.back() = std::max(0.0, 1.0 - total);
  std::vector<std::pair<double, TabularPolicy>> comps;
  for (std::size_t i = 0; i < n; ++i) comps.emplace_back(w[i], make());
  return MixedPolicy(std::move(comps));
}

}  // namespace gtt
