#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rwe/graph.hpp"
#include "rwe/random.hpp"

namespace testutil {

inline std::string uid(int k) { return "u" + std::to_string(k); }
inline std::string iid(int k) { return "i" + std::to_string(k); }

/// Random bipartite interactions; every user gets at least one edge so the
/// built graph keeps its shape predictable.
inline std::vector<std::pair<std::string, std::string>> random_interactions(
    rwe::Rng& rng, int users, int items, double density) {
  std::vector<std::pair<std::string, std::string>> out;
  for (int u = 0; u < users; ++u) {
    out.emplace_back(uid(u), iid(static_cast<int>(rng.below(items))));
    for (int i = 0; i < items; ++i) {
      if (rng.uniform01() < density) out.emplace_back(uid(u), iid(i));
    }
  }
  return out;
}

inline rwe::FeedbackGraph random_graph(rwe::Rng& rng, int max_users = 12,
                                       int max_items = 10, double density = 0.3) {
  const int users = 2 + static_cast<int>(rng.below(max_users - 1));
  const int items = 2 + static_cast<int>(rng.below(max_items - 1));
  return rwe::FeedbackGraph::build(random_interactions(rng, users, items, density), 1, 1);
}

/// Dense copy of the sparse transition matrix, for brute-force oracles.
inline std::vector<std::vector<double>> dense_matrix(const rwe::TransitionMatrix& P) {
  const rwe::Index dim = P.dim();
  std::vector<std::vector<double>> M(dim, std::vector<double>(dim, 0.0));
  for (rwe::Index v = 0; v < dim; ++v) {
    const auto cols = P.row_cols(v);
    const auto vals = P.row_vals(v);
    for (std::size_t e = 0; e < cols.size(); ++e) M[v][cols[e]] = vals[e];
  }
  return M;
}

inline std::vector<double> dense_propagate(const std::vector<std::vector<double>>& M,
                                           std::vector<double> v, int steps) {
  const std::size_t dim = M.size();
  for (int s = 0; s < steps; ++s) {
    std::vector<double> next(dim, 0.0);
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = 0; b < dim; ++b) next[b] += v[a] * M[a][b];
    }
    v = std::move(next);
  }
  return v;
}

}  // namespace testutil
