#include "gtt/analytics/export.hpp"

#include "gtt/common/csv.hpp"

namespace gtt {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_matrix_csv(std::ostream& os, const DMatrix& m, MatrixField field) {
  std::vector<std::string> header{"actor"};
  header.insert(header.end(), m.models.begin(), m.models.end());
  write_csv_row(os, header);
  const auto& values = field == MatrixField::kDHat ? m.d_hat : m.se;
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::vector<std::string> row{m.models[i]};
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(values[i][j] ? format_double(*values[i][j]) : "");
    write_csv_row(os, row);
  }
}

void write_scores_csv(std::ostream& os, const ScoreTable& t) {
  write_csv_row(os, {"model", "F", "D", "T"});
  for (const auto& r : t.rows) {
    write_csv_row(os, {r.model, format_double(r.fooling), format_double(r.distinguishing), format_double(r.turing)});
  }
}

void write_fd_scores_csv(std::ostream& os, const std::vector<FdScoreRow>& rows) {
  write_csv_row(os, {"distinguisher", "model", "F_D", "R_D", "T_D"});
  for (const auto& r : rows) {
    write_csv_row(os, {r.distinguisher, r.model, format_double(r.fooling), format_double(r.resistance),
                       format_double(r.turing)});
  }
}

void write_counts_csv(std::ostream& os, const CountTable& t) {
  write_csv_row(os, {"actor", "target", "distinguisher", "imit_said_0", "imit_said_1", "target_said_1",
                     "target_said_0", "unparseable", "opening", "analyzable", "p_hat", "d_hat"});
  for (const auto& [key, c] : t.cells) {
    std::string p, d;
    if (c.n_self() && c.n_imit()) {
      const PairEstimate e = estimate_pair(c);
      p = format_double(e.p_hat);
      d = format_double(e.d_hat);
    }
    write_csv_row(os, {key.actor, key.target, key.distinguisher, std::to_string(c.imit_said_0),
                       std::to_string(c.imit_said_1), std::to_string(c.target_said_1), std::to_string(c.target_said_0),
                       std::to_string(c.unparseable), std::to_string(c.opening), std::to_string(c.analyzable()), p,
                       d});
  }
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  write_csv_row(os, {"epsilon", "edges", "strict_edges", "classes", "transitivity_violations"});
  for (const auto& p : curve) {
    write_csv_row(os, {format_double(p.epsilon), std::to_string(p.edges), std::to_string(p.strict_edges),
                       std::to_string(p.classes), std::to_string(p.violations)});
  }
}

void write_dot(std::ostream& os, const RelationGraph& g) {
  os << "digraph gtt {\n";
  os << "  label=" << quoted("epsilon = " + format_double(g.epsilon)) << ";\n";
  for (std::size_t c = 0; c < g.classes.size(); ++c) {
    os << "  subgraph cluster_" << c << " {\n";
    for (auto i : g.classes[c]) os << "    " << quoted(g.models[i]) << ";\n";
    os << "  }\n";
  }
  for (std::size_t a = 0; a < g.models.size(); ++a) {
    for (std::size_t b = 0; b < g.models.size(); ++b) {
      if (g.strict_edges[a][b]) {
        os << "  " << quoted(g.models[a]) << " -> " << quoted(g.models[b]) << ";\n";
      } else if (g.edges[a][b] && a < b) {
        os << "  " << quoted(g.models[a]) << " -> " << quoted(g.models[b]) << " [dir=both, style=dashed];\n";
      }
    }
  }
  os << "}\n";
}

}  // namespace gtt
