#pragma once

#include <ostream>

#include "gtt/analytics/relation.hpp"
#include "gtt/analytics/scores.hpp"

namespace gtt {

enum class MatrixField { kDHat, kSe };

/// Header "actor,<targets...>"; empty cells stay empty.
void write_matrix_csv(std::ostream& os, const DMatrix& m, MatrixField field);
void write_scores_csv(std::ostream& os, const ScoreTable& t);
void write_fd_scores_csv(std::ostream& os, const std::vector<FdScoreRow>& rows);
/// Per-cell tallies plus the analyzable count and p_hat/d_hat when defined.
void write_counts_csv(std::ostream& os, const CountTable& t);
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);

/// Graphviz digraph. Strict edges are solid, mutual edges dashed and drawn
/// once, and each equivalence class is a cluster.
void write_dot(std::ostream& os, const RelationGraph& g);

}  // namespace gtt
