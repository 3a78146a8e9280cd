#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rwe/errors.hpp"
#include "rwe/types.hpp"

namespace rwe {

/// Immutable bipartite implicit-feedback graph. Users carry dense indices
/// [0, m), items [0, n); edges are unweighted and deduplicated. Vertices of
/// the combined random-walk graph are numbered users first, then items.
class FeedbackGraph {
 public:
  FeedbackGraph() = default;

  /// Builds the graph from raw (user_id, item_id) interactions. Duplicates
  /// collapse to one edge; nodes below their degree threshold are removed
  /// iteratively until a fixed point (removals can lower other degrees).
  /// Dense indices follow first-seen order of the surviving external IDs.
  static FeedbackGraph build(
      const std::vector<std::pair<std::string, std::string>>& interactions,
      int min_user_degree = 1, int min_item_degree = 1) {
    if (interactions.empty()) {
      throw DataError("build_graph: no interactions given");
    }
    if (min_user_degree < 1 || min_item_degree < 1) {
      throw std::invalid_argument("build_graph: degree thresholds must be >= 1");
    }

    // Provisional dense ids in first-seen order, edges deduplicated.
    std::unordered_map<std::string, Index> umap, imap;
    std::vector<std::string> uids, iids;
    std::vector<std::vector<Index>> adj_u;  // user -> items
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(interactions.size() * 2);
    for (const auto& [uid, iid] : interactions) {
      if (uid.empty() || iid.empty()) {
        throw DataError("build_graph: empty user or item id");
      }
      auto [uit, unew] = umap.try_emplace(uid, static_cast<Index>(uids.size()));
      if (unew) {
        uids.push_back(uid);
        adj_u.emplace_back();
      }
      auto [iit, inew] = imap.try_emplace(iid, static_cast<Index>(iids.size()));
      if (inew) iids.push_back(iid);
      const std::uint64_t key =
          (static_cast<std::uint64_t>(uit->second) << 32) |
          static_cast<std::uint32_t>(iit->second);
      if (seen.insert(key).second) {
        adj_u[uit->second].push_back(iit->second);
      }
    }

    // Peel nodes below threshold until the degrees reach a fixed point.
    std::vector<std::vector<Index>> adj_i(iids.size());
    for (Index u = 0; u < static_cast<Index>(adj_u.size()); ++u) {
      for (Index i : adj_u[u]) adj_i[i].push_back(u);
    }
    std::vector<Index> udeg(uids.size()), ideg(iids.size());
    for (std::size_t u = 0; u < adj_u.size(); ++u) udeg[u] = static_cast<Index>(adj_u[u].size());
    for (std::size_t i = 0; i < adj_i.size(); ++i) ideg[i] = static_cast<Index>(adj_i[i].size());
    std::vector<char> udead(uids.size(), 0), idead(iids.size(), 0);
    std::vector<Index> work_u, work_i;
    for (Index u = 0; u < static_cast<Index>(udeg.size()); ++u) {
      if (udeg[u] < min_user_degree) work_u.push_back(u);
    }
    for (Index i = 0; i < static_cast<Index>(ideg.size()); ++i) {
      if (ideg[i] < min_item_degree) work_i.push_back(i);
    }
    while (!work_u.empty() || !work_i.empty()) {
      while (!work_u.empty()) {
        Index u = work_u.back();
        work_u.pop_back();
        if (udead[u]) continue;
        udead[u] = 1;
        for (Index i : adj_u[u]) {
          if (!idead[i] && --ideg[i] < min_item_degree) work_i.push_back(i);
        }
      }
      while (!work_i.empty()) {
        Index i = work_i.back();
        work_i.pop_back();
        if (idead[i]) continue;
        idead[i] = 1;
        for (Index u : adj_i[i]) {
          if (!udead[u] && --udeg[u] < min_user_degree) work_u.push_back(u);
        }
      }
    }

    // Reindex survivors, preserving first-seen order.
    FeedbackGraph g;
    std::vector<Index> unew(uids.size(), -1), inew(iids.size(), -1);
    for (Index u = 0; u < static_cast<Index>(uids.size()); ++u) {
      if (!udead[u]) {
        unew[u] = static_cast<Index>(g.user_ids_.size());
        g.user_ids_.push_back(uids[u]);
      }
    }
    for (Index i = 0; i < static_cast<Index>(iids.size()); ++i) {
      if (!idead[i]) {
        inew[i] = static_cast<Index>(g.item_ids_.size());
        g.item_ids_.push_back(iids[i]);
      }
    }
    std::vector<std::pair<Index, Index>> edges;
    for (Index u = 0; u < static_cast<Index>(adj_u.size()); ++u) {
      if (udead[u]) continue;
      for (Index i : adj_u[u]) {
        if (!idead[i]) edges.emplace_back(unew[u], inew[i]);
      }
    }
    if (edges.empty()) {
      throw DataError(
          "build_graph: no interactions survive degree filtering "
          "(min_user_degree=" + std::to_string(min_user_degree) +
          ", min_item_degree=" + std::to_string(min_item_degree) + ")");
    }
    g.finish(edges);
    return g;
  }

  /// Builds a graph over a fixed index space from pre-resolved index edges.
  /// Used for train projections of an existing graph: the id maps are kept
  /// and vertices may end up with degree zero.
  static FeedbackGraph from_indexed_edges(std::vector<std::string> user_ids,
                                          std::vector<std::string> item_ids,
                                          std::vector<std::pair<Index, Index>> edges) {
    FeedbackGraph g;
    g.user_ids_ = std::move(user_ids);
    g.item_ids_ = std::move(item_ids);
    for (const auto& [u, i] : edges) {
      if (u < 0 || u >= g.num_users() || i < 0 || i >= g.num_items()) {
        throw std::invalid_argument("from_indexed_edges: edge index out of range");
      }
    }
    g.finish(edges);
    return g;
  }

  Index num_users() const { return static_cast<Index>(user_ids_.size()); }
  Index num_items() const { return static_cast<Index>(item_ids_.size()); }
  std::int64_t num_edges() const { return static_cast<std::int64_t>(user_items_.size()); }

  Index user_degree(Index u) const { return user_offsets_[u + 1] - user_offsets_[u]; }
  Index item_degree(Index i) const { return item_offsets_[i + 1] - item_offsets_[i]; }

  /// Item neighbors of a user, ascending item index.
  std::span<const Index> items_of(Index u) const {
    return {user_items_.data() + user_offsets_[u],
            user_items_.data() + user_offsets_[u + 1]};
  }
  /// User neighbors of an item, ascending user index.
  std::span<const Index> users_of(Index i) const {
    return {item_users_.data() + item_offsets_[i],
            item_users_.data() + item_offsets_[i + 1]};
  }

  bool has_edge(Index u, Index i) const {
    auto s = items_of(u);
    return std::binary_search(s.begin(), s.end(), i);
  }

  const std::string& user_id(Index u) const { return user_ids_[u]; }
  const std::string& item_id(Index i) const { return item_ids_[i]; }
  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }

  /// Dense index for an external id, or -1 if absent.
  Index find_user(const std::string& id) const { return find(user_lookup_, id); }
  Index find_item(const std::string& id) const { return find(item_lookup_, id); }

 private:
  static Index find(const std::unordered_map<std::string, Index>& m, const std::string& id) {
    auto it = m.find(id);
    return it == m.end() ? -1 : it->second;
  }

  void finish(std::vector<std::pair<Index, Index>>& edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    user_offsets_.assign(num_users() + 1, 0);
    item_offsets_.assign(num_items() + 1, 0);
    user_items_.resize(edges.size());
    item_users_.resize(edges.size());
    for (const auto& [u, i] : edges) {
      ++user_offsets_[u + 1];
      ++item_offsets_[i + 1];
    }
    for (Index u = 0; u < num_users(); ++u) user_offsets_[u + 1] += user_offsets_[u];
    for (Index i = 0; i < num_items(); ++i) item_offsets_[i + 1] += item_offsets_[i];
    std::vector<Index> ucur(user_offsets_.begin(), user_offsets_.end() - 1);
    std::vector<Index> icur(item_offsets_.begin(), item_offsets_.end() - 1);
    for (const auto& [u, i] : edges) {
      user_items_[ucur[u]++] = i;
      item_users_[icur[i]++] = u;
    }
    user_lookup_.reserve(user_ids_.size());
    item_lookup_.reserve(item_ids_.size());
    for (Index u = 0; u < num_users(); ++u) user_lookup_[user_ids_[u]] = u;
    for (Index i = 0; i < num_items(); ++i) item_lookup_[item_ids_[i]] = i;
  }

  std::vector<std::string> user_ids_, item_ids_;
  std::unordered_map<std::string, Index> user_lookup_, item_lookup_;
  std::vector<Index> user_offsets_, user_items_;  // CSR user -> items
  std::vector<Index> item_offsets_, item_users_;  // CSR item -> users
};

/// Dense non-negative walk mass over the m+n bipartite vertices.
using MassVector = std::vector<double>;

/// Row-stochastic sparse transition matrix over the m+n bipartite vertices
/// (users first, then items). Every nonempty row sums to 1; rows are empty
/// only for isolated vertices, which can occur in train projections.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;

  explicit TransitionMatrix(const FeedbackGraph& g)
      : num_users_(g.num_users()), num_items_(g.num_items()) {
    const Index dim = num_users_ + num_items_;
    offsets_.assign(dim + 1, 0);
    cols_.resize(2 * g.num_edges());
    vals_.resize(2 * g.num_edges());
    std::size_t pos = 0;
    for (Index u = 0; u < num_users_; ++u) {
      offsets_[u] = static_cast<Index>(pos);
      const auto items = g.items_of(u);
      const double p = items.empty() ? 0.0 : 1.0 / static_cast<double>(items.size());
      for (Index i : items) {
        cols_[pos] = num_users_ + i;
        vals_[pos] = p;
        ++pos;
      }
    }
    for (Index i = 0; i < num_items_; ++i) {
      offsets_[num_users_ + i] = static_cast<Index>(pos);
      const auto users = g.users_of(i);
      const double p = users.empty() ? 0.0 : 1.0 / static_cast<double>(users.size());
      for (Index u : users) {
        cols_[pos] = u;
        vals_[pos] = p;
        ++pos;
      }
    }
    offsets_[dim] = static_cast<Index>(pos);
  }

  Index dim() const { return num_users_ + num_items_; }
  Index num_users() const { return num_users_; }
  Index num_items() const { return num_items_; }

  std::span<const Index> row_cols(Index v) const {
    return {cols_.data() + offsets_[v], cols_.data() + offsets_[v + 1]};
  }
  std::span<const double> row_vals(Index v) const {
    return {vals_.data() + offsets_[v], vals_.data() + offsets_[v + 1]};
  }

 private:
  Index num_users_ = 0, num_items_ = 0;
  std::vector<Index> offsets_;
  std::vector<Index> cols_;
  std::vector<double> vals_;
};

inline TransitionMatrix transition(const FeedbackGraph& g) {
  if (g.num_users() == 0 || g.num_items() == 0) {
    throw std::invalid_argument("transition: empty graph");
  }
  return TransitionMatrix(g);
}

namespace detail {

/// One step of v <- v P into `next` (overwritten).
inline void step(const TransitionMatrix& P, const MassVector& cur, MassVector& next) {
  std::fill(next.begin(), next.end(), 0.0);
  const Index dim = P.dim();
  for (Index v = 0; v < dim; ++v) {
    const double mass = cur[v];
    if (mass == 0.0) continue;
    const auto cols = P.row_cols(v);
    const auto vals = P.row_vals(v);
    for (std::size_t e = 0; e < cols.size(); ++e) {
      next[cols[e]] += mass * vals[e];
    }
  }
}

}  // namespace detail

/// start . P^steps by repeated sparse vector-matrix products; P^k is never
/// materialized. Total mass is preserved (no damping, no teleport).
inline MassVector propagate(const TransitionMatrix& P, MassVector start, int steps) {
  if (steps < 1) throw std::invalid_argument("propagate: steps must be >= 1");
  if (static_cast<Index>(start.size()) != P.dim()) {
    throw std::invalid_argument("propagate: start vector dimension mismatch");
  }
  MassVector next(start.size());
  for (int s = 0; s < steps; ++s) {
    detail::step(P, start, next);
    start.swap(next);
  }
  return start;
}

}  // namespace rwe
