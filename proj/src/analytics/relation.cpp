#include "gtt/analytics/relation.hpp"

#include <algorithm>
#include <functional>

#include <boost/dynamic_bitset.hpp>
#include <nlohmann/json.hpp>

namespace gtt {

namespace {

using Components = std::vector<std::vector<std::size_t>>;

Components connected_components(const Adjacency& undirected) {
  const std::size_t n = undirected.size();
  std::vector<bool> seen(n, false);
  Components out;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (std::size_t v = 0; v < n; ++v) {
        if (undirected[u][v] && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

// Tarjan's algorithm.
Components strongly_connected(const Adjacency& g) {
  const std::size_t n = g.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0;
  Components out;

  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w = 0; w < n; ++w) {
      if (!g[v][w]) continue;
      if (index[w] == kUnset) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] == kUnset) visit(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

DMatrix d_matrix(const CountTable& table, const std::optional<std::string>& distinguisher) {
  DMatrix m;
  for (const auto& model : table.models) {
    if (!distinguisher || model != *distinguisher) m.models.push_back(model);
  }
  const std::size_t n = m.models.size();
  m.d_hat.assign(n, std::vector<std::optional<double>>(n));
  m.se.assign(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::string& judge = distinguisher ? *distinguisher : m.models[j];
      const auto* c = table.find({m.models[i], m.models[j], judge});
      if (!c || c->n_self() == 0 || c->n_imit() == 0) continue;
      const PairEstimate e = estimate_pair(*c);
      m.d_hat[i][j] = e.d_hat;
      m.se[i][j] = e.se;
    }
  }
  return m;
}

std::size_t transitivity_violations(const Adjacency& edges) {
  const std::size_t n = edges.size();
  std::vector<boost::dynamic_bitset<>> out(n, boost::dynamic_bitset<>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && edges[a][b]) out[a].set(b);
    }
  }
  std::size_t count = 0;
  for (std::size_t a = 0; a < n; ++a) {
    boost::dynamic_bitset<> missing = ~out[a];
    missing.reset(a);
    for (std::size_t b = out[a].find_first(); b != boost::dynamic_bitset<>::npos; b = out[a].find_next(b)) {
      boost::dynamic_bitset<> open = out[b] & missing;
      open.reset(b);
      count += open.count();
    }
  }
  return count;
}

RelationGraph relation_at_epsilon(const DMatrix& d, double epsilon) {
  const std::size_t n = d.size();
  RelationGraph g;
  g.epsilon = epsilon;
  g.models = d.models;
  g.edges.assign(n, std::vector<bool>(n, false));
  g.strict_edges.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && d.d_hat[i][j] && *d.d_hat[i][j] <= epsilon) {
        g.edges[i][j] = true;
        ++g.edge_count;
      }
    }
  }
  Adjacency mutual(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!g.edges[i][j]) continue;
      if (g.edges[j][i]) {
        mutual[i][j] = true;
      } else {
        g.strict_edges[i][j] = true;
        ++g.strict_edge_count;
      }
    }
  }
  g.classes = connected_components(mutual);
  g.sccs = strongly_connected(g.edges);
  g.violations = transitivity_violations(g.edges);
  return g;
}

std::vector<CurvePoint> epsilon_curve(const DMatrix& d, const std::vector<double>& grid) {
  std::vector<CurvePoint> out;
  out.reserve(grid.size());
  for (double eps : grid) {
    const RelationGraph g = relation_at_epsilon(d, eps);
    out.push_back({eps, g.edge_count, g.strict_edge_count, g.classes.size(), g.violations});
  }
  return out;
}

void to_json(nlohmann::json& j, const RelationGraph& g) {
  auto names = [&](const std::vector<std::vector<std::size_t>>& comps) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& comp : comps) {
      nlohmann::json c = nlohmann::json::array();
      for (auto i : comp) c.push_back(g.models[i]);
      arr.push_back(std::move(c));
    }
    return arr;
  };
  auto edge_list = [&](const Adjacency& adj) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t a = 0; a < adj.size(); ++a) {
      for (std::size_t b = 0; b < adj.size(); ++b) {
        if (adj[a][b]) arr.push_back({g.models[a], g.models[b]});
      }
    }
    return arr;
  };
  j = {{"epsilon", g.epsilon},
       {"models", g.models},
       {"edges", edge_list(g.edges)},
       {"strict_edges", edge_list(g.strict_edges)},
       {"classes", names(g.classes)},
       {"sccs", names(g.sccs)},
       {"transitivity_violations", g.violations}};
}

void to_json(nlohmann::json& j, const CurvePoint& p) {
  j = {{"epsilon", p.epsilon},
       {"edges", p.edges},
       {"strict_edges", p.strict_edges},
       {"classes", p.classes},
       {"transitivity_violations", p.violations}};
}

}  // namespace gtt
