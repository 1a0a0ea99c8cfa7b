#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gtt/analytics/estimate.hpp"

namespace gtt {

/// Row = actor, column = target. Diagonal and unestimated cells are empty.
struct DMatrix {
  std::vector<std::string> models;
  std::vector<std::vector<std::optional<double>>> d_hat;
  std::vector<std::vector<std::optional<double>>> se;

  std::size_t size() const { return models.size(); }
};

/// Off-diagonal cells whose branches are both non-empty; others stay empty.
/// With `distinguisher` set, uses that fixed distinguisher's cells.
DMatrix d_matrix(const CountTable& table, const std::optional<std::string>& distinguisher = std::nullopt);

using Adjacency = std::vector<std::vector<bool>>;

struct RelationGraph {
  double epsilon = 0.0;
  std::vector<std::string> models;
  /// A -> B iff d_hat(A, B) <= epsilon.
  Adjacency edges;
  /// A -> B and not B -> A.
  Adjacency strict_edges;
  /// Connected components of the mutual-edge graph, each sorted, ordered by
  /// smallest member.
  std::vector<std::vector<std::size_t>> classes;
  /// Strongly connected components of `edges`, same ordering.
  std::vector<std::vector<std::size_t>> sccs;
  std::size_t edge_count = 0;
  std::size_t strict_edge_count = 0;
  std::size_t violations = 0;
};

RelationGraph relation_at_epsilon(const DMatrix& d, double epsilon);

/// Ordered triples of distinct (A, B, C) with A -> B, B -> C and not A -> C.
std::size_t transitivity_violations(const Adjacency& edges);

struct CurvePoint {
  double epsilon = 0.0;
  std::size_t edges = 0;
  std::size_t strict_edges = 0;
  std::size_t classes = 0;
  std::size_t violations = 0;
};

std::vector<CurvePoint> epsilon_curve(const DMatrix& d, const std::vector<double>& grid);

void to_json(nlohmann::json& j, const RelationGraph& g);
void to_json(nlohmann::json& j, const CurvePoint& p);

}  // namespace gtt
