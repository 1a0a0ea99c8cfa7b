#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gtt/tabular/policy.hpp"

namespace gtt {

using Symbols = std::vector<std::string>;

/// First `n` of "a", "b", "c", ...
Symbols make_symbols(std::size_t n);

/// Every sequence of exactly `length` symbols, in lexicographic order.
std::vector<Dialogue> sequences(const Symbols& symbols, std::size_t length);

/// Flat-Dirichlet row over `symbols`; one row in four is a point mass.
Row random_row(std::mt19937_64& rng, const Symbols& symbols);

/// Full-history distinguisher for games of at most `horizon` turns. Before
/// the last turn it may emit verdicts (mass at most `verdict_mass`); on the
/// last turn it only emits verdicts.
TabularPolicy random_distinguisher(std::mt19937_64& rng, const Symbols& symbols, std::size_t horizon,
                                   double verdict_mass = 0.5);

/// Interlocutor answering odd-length dialogues up to `max_length` payloads,
/// placed after each of `prefixes` (a single empty prefix by default).
TabularPolicy random_responder(std::mt19937_64& rng, const Symbols& symbols, std::size_t max_length,
                               const std::vector<Dialogue>& prefixes = {Dialogue{}});

/// Query-stage behaviour over `cap` rounds; each row may emit STOP.
TabularPolicy random_querier(std::mt19937_64& rng, const Symbols& symbols, std::size_t cap);

/// Every transcript a query stage of `cap` rounds can end with.
std::vector<Dialogue> query_transcripts(const Symbols& symbols, std::size_t cap);

/// Dialogue length the target must answer for a main phase of `horizon` turns.
inline std::size_t responder_length(std::size_t horizon) { return horizon >= 2 ? 2 * horizon - 3 : 0; }

/// Rows of `base` keyed behind `prefix`. Requires a full-history table.
TabularPolicy prefixed(const TabularPolicy& base, const Dialogue& prefix);

/// Rows of `base` whose key starts with `prefix`, with the prefix removed.
TabularPolicy strip_prefix(const TabularPolicy& base, const Dialogue& prefix);

/// Union of two tables with disjoint contexts.
TabularPolicy merge(const TabularPolicy& a, const TabularPolicy& b);

/// Independent latent choices in `a` and `b`, for tables with disjoint contexts.
MixedPolicy product(const MixedPolicy& a, const MixedPolicy& b);

MixedPolicy map_components(const MixedPolicy& m, const std::function<TabularPolicy(const TabularPolicy&)>& f);

/// Swaps the two verdict symbols everywhere.
TabularPolicy flip_verdicts(const TabularPolicy& p);

/// One to `max_components` components from `make`, with random weights.
MixedPolicy random_mixture(std::mt19937_64& rng, std::size_t max_components,
                           const std::function<TabularPolicy()>& make);

}  // namespace gtt
