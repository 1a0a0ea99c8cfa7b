#include "gtt/theory/distance.hpp"

#include <cmath>
#include <map>

#include "gtt/common/errors.hpp"

namespace gtt {

double l1_distance(const TabularPolicy& p, const TabularPolicy& q, const ContextDistribution& contexts) {
  double mass = 0.0;
  double total = 0.0;
  for (const auto& [context, weight] : contexts) {
    if (weight < 0.0) throw DomainError("negative context weight");
    mass += weight;
    if (weight == 0.0) continue;
    std::map<std::string_view, double> diff;
    for (const auto& o : p.row(context)) diff[o.symbol] += o.probability;
    for (const auto& o : q.row(context)) diff[o.symbol] -= o.probability;
    double row_sum = 0.0;
    for (const auto& [symbol, d] : diff) row_sum += std::abs(d);
    total += weight * row_sum;
  }
  if (std::abs(mass - 1.0) > kRowTolerance) {
    throw DomainError("context distribution sums to " + std::to_string(mass));
  }
  return total;
}

}  // namespace gtt
