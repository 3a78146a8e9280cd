#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rwe/erasure.hpp"
#include "rwe/graph.hpp"
#include "rwe/parallel.hpp"
#include "rwe/walk.hpp"

namespace rwe {

/// Sparse per-user item scores, ascending item index. Items absent from the
/// map implicitly score 0.
using ScoreMap = std::vector<std::pair<Index, double>>;

/// Top-k recommendations for one user: (item, score) with scores
/// non-increasing and exact ties broken by ascending item index.
struct RankedList {
  Index user = -1;
  std::vector<std::pair<Index, double>> entries;
};

/// Three-hop walk probability from `user` to every reachable item.
inline ScoreMap p3_score(const TransitionMatrix& P, Index user) {
  if (user < 0 || user >= P.num_users()) {
    throw std::invalid_argument("p3_score: user index out of range");
  }
  MassVector start(P.dim(), 0.0);
  start[user] = 1.0;
  const MassVector mass = propagate(P, std::move(start), 3);
  ScoreMap scores;
  for (Index j = 0; j < P.num_items(); ++j) {
    const double p = mass[P.num_users() + j];
    if (p > 0.0) scores.emplace_back(j, p);
  }
  return scores;
}

/// P3 scores reweighted by item popularity: score_j / degree(j)^beta.
inline ScoreMap rp3b_score(const TransitionMatrix& P, const FeedbackGraph& graph,
                           Index user, double beta) {
  if (beta < 0.0) throw std::invalid_argument("rp3b_score: beta must be >= 0");
  ScoreMap scores = p3_score(P, user);
  if (beta != 0.0) {
    for (auto& [item, s] : scores) {
      s /= std::pow(static_cast<double>(graph.item_degree(item)), beta);
    }
  }
  return scores;
}

/// Truncated item-item cosine neighborhoods over binary incidence columns.
class ItemSimilarityIndex {
 public:
  ItemSimilarityIndex(const FeedbackGraph& graph, int neighborhood_size) {
    if (neighborhood_size < 1) {
      throw std::invalid_argument("ItemSimilarityIndex: neighborhood size must be >= 1");
    }
    const Index n = graph.num_items();
    offsets_.assign(n + 1, 0);
    std::vector<std::vector<std::pair<Index, double>>> lists(n);
    parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t, std::size_t begin,
                                                     std::size_t end) {
      std::vector<Index> counts(n, 0);
      std::vector<Index> touched;
      for (std::size_t ii = begin; ii < end; ++ii) {
        const Index i = static_cast<Index>(ii);
        for (Index u : graph.users_of(i)) {
          for (Index j : graph.items_of(u)) {
            if (j == i) continue;
            if (counts[j]++ == 0) touched.push_back(j);
          }
        }
        auto& list = lists[i];
        const double di = static_cast<double>(graph.item_degree(i));
        list.reserve(touched.size());
        for (Index j : touched) {
          const double c = static_cast<double>(counts[j]);
          list.emplace_back(j, c / std::sqrt(di * static_cast<double>(graph.item_degree(j))));
          counts[j] = 0;
        }
        touched.clear();
        const std::size_t keep = std::min<std::size_t>(list.size(), neighborhood_size);
        std::partial_sort(list.begin(), list.begin() + keep, list.end(),
                          [](const auto& a, const auto& b) {
                            if (a.second != b.second) return a.second > b.second;
                            return a.first < b.first;
                          });
        list.resize(keep);
      }
    });
    for (Index i = 0; i < n; ++i) {
      offsets_[i + 1] = offsets_[i] + static_cast<Index>(lists[i].size());
    }
    neighbors_.reserve(offsets_[n]);
    for (Index i = 0; i < n; ++i) {
      neighbors_.insert(neighbors_.end(), lists[i].begin(), lists[i].end());
    }
  }

  std::span<const std::pair<Index, double>> neighbors(Index item) const {
    return {neighbors_.data() + offsets_[item], neighbors_.data() + offsets_[item + 1]};
  }

 private:
  std::vector<Index> offsets_;
  std::vector<std::pair<Index, double>> neighbors_;
};

/// Item-based CF: sum of cosine similarities from each of the user's training
/// items to its neighborhood. Cold users yield an empty map.
inline ScoreMap itemknn_score(const ItemSimilarityIndex& index, const FeedbackGraph& graph,
                              Index user) {
  std::vector<std::pair<Index, double>> acc;
  for (Index i : graph.items_of(user)) {
    for (const auto& [j, sim] : index.neighbors(i)) {
      acc.emplace_back(j, sim);
    }
  }
  std::sort(acc.begin(), acc.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  ScoreMap scores;
  for (std::size_t e = 0; e < acc.size();) {
    double total = 0.0;
    const Index item = acc[e].first;
    while (e < acc.size() && acc[e].first == item) total += acc[e++].second;
    scores.emplace_back(item, total);
  }
  return scores;
}

/// Removes the user's training items, sorts the rest by (score desc, item
/// asc), truncates to k. Only items present in the score map are candidates.
inline RankedList recommend_topk(const ScoreMap& scores,
                                 const std::vector<Index>& train_items_sorted, Index user,
                                 int k) {
  if (k < 1) throw std::invalid_argument("recommend_topk: k must be >= 1");
  RankedList out;
  out.user = user;
  out.entries.reserve(scores.size());
  for (const auto& entry : scores) {
    if (!std::binary_search(train_items_sorted.begin(), train_items_sorted.end(),
                            entry.first)) {
      out.entries.push_back(entry);
    }
  }
  const std::size_t keep = std::min<std::size_t>(out.entries.size(), k);
  std::partial_sort(out.entries.begin(), out.entries.begin() + keep, out.entries.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  out.entries.resize(keep);
  return out;
}

/// Full deterministic ranking over every non-train item, zero-score items
/// included; accuracy metrics (AUC, MR) need the complete candidate order.
inline RankedList rank_all_candidates(const ScoreMap& scores, Index num_items,
                                      const std::vector<Index>& train_items_sorted,
                                      Index user) {
  std::vector<double> dense(num_items, 0.0);
  for (const auto& [item, s] : scores) dense[item] = s;
  RankedList out;
  out.user = user;
  out.entries.reserve(num_items - train_items_sorted.size());
  for (Index j = 0; j < num_items; ++j) {
    if (!std::binary_search(train_items_sorted.begin(), train_items_sorted.end(), j)) {
      out.entries.emplace_back(j, dense[j]);
    }
  }
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

/// Fixed 10-significant-digit decimal, the ranked-list interchange format.
inline std::string format_score(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

/// TSV interchange format: user_id, rank, item_id, score. One block of rows
/// per user, rank ascending from 1.
inline void write_ranked_tsv(std::ostream& os, const FeedbackGraph& graph,
                             const std::vector<RankedList>& lists) {
  for (const auto& list : lists) {
    int rank = 1;
    for (const auto& [item, score] : list.entries) {
      os << graph.user_id(list.user) << '\t' << rank++ << '\t' << graph.item_id(item)
         << '\t' << format_score(score) << '\n';
    }
  }
}

/// Reads ranked lists back from the TSV interchange format. Ids must resolve
/// against `graph`; ranks within a user's block must ascend from 1.
inline std::vector<RankedList> read_ranked_tsv(std::istream& is, const FeedbackGraph& graph,
                                               const std::string& source = "<ranked tsv>") {
  std::vector<RankedList> lists;
  std::vector<Index> slot(graph.num_users(), -1);
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(lineno);
    std::array<std::string, 4> fields;
    std::size_t pos = 0;
    for (int f = 0; f < 4; ++f) {
      const std::size_t tab = line.find('\t', pos);
      if (f < 3 && tab == std::string::npos) {
        throw DataError(where + ": expected 4 tab-separated fields");
      }
      fields[f] = line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos);
      pos = tab + 1;
    }
    const Index user = graph.find_user(fields[0]);
    if (user < 0) throw DataError(where + ": unknown user id '" + fields[0] + "'");
    const Index item = graph.find_item(fields[2]);
    if (item < 0) throw DataError(where + ": unknown item id '" + fields[2] + "'");
    int rank = 0;
    double score = 0.0;
    try {
      rank = std::stoi(fields[1]);
      score = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw DataError(where + ": malformed rank or score");
    }
    if (slot[user] < 0) {
      slot[user] = static_cast<Index>(lists.size());
      lists.push_back(RankedList{user, {}});
    }
    auto& entries = lists[slot[user]].entries;
    if (rank != static_cast<int>(entries.size()) + 1) {
      throw DataError(where + ": rank " + fields[1] + " out of order for user '" +
                      fields[0] + "'");
    }
    entries.emplace_back(item, score);
  }
  return lists;
}

}  // namespace rwe
