#pragma once

#include <utility>
#include <vector>

#include "gtt/tabular/policy.hpp"

namespace gtt {

using ContextDistribution = std::vector<std::pair<Dialogue, double>>;

/// Σ_y D(y) Σ_x |P(x|y) − Q(x|y)|, the unnormalised L1 form (disjoint point
/// masses are at distance 2). Throws DomainError when D puts mass on a
/// context either table lacks, or when D does not sum to 1.
double l1_distance(const TabularPolicy& p, const TabularPolicy& q, const ContextDistribution& contexts);

}  // namespace gtt
