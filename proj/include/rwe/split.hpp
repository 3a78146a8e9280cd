#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "rwe/graph.hpp"
#include "rwe/random.hpp"

namespace rwe {

/// Per-user random holdout protocol: users with at least min_interactions
/// give round(test_fraction * degree) items (at least one) to the test set,
/// everyone else keeps all edges in train. Repeated `repetitions` times.
struct SplitSpec {
  double test_fraction = 0.3;
  int min_interactions = 4;  // "more than three interactions"
  int repetitions = 3;
  std::uint64_t seed = 0;
};

struct TrainTestSplit {
  FeedbackGraph train;  // same index space as the source graph
  std::vector<std::vector<Index>> test_items_by_user;  // ascending per user
  std::int64_t num_test_edges = 0;
  std::uint64_t fingerprint = 0;  // hash of the sorted test edge set
};

namespace detail {

inline std::uint64_t fingerprint_edges(const std::vector<std::pair<Index, Index>>& sorted_edges) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto absorb = [&h](std::uint32_t v) {
    for (int b = 0; b < 4; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [u, i] : sorted_edges) {
    absorb(static_cast<std::uint32_t>(u));
    absorb(static_cast<std::uint32_t>(i));
  }
  return h;
}

}  // namespace detail

inline std::vector<TrainTestSplit> split(const FeedbackGraph& graph, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw std::invalid_argument("split: test_fraction must lie in (0, 1)");
  }
  if (spec.repetitions < 1) throw std::invalid_argument("split: repetitions must be >= 1");

  std::vector<TrainTestSplit> out;
  out.reserve(spec.repetitions);
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    const std::uint64_t rep_seed = derive_seed(spec.seed, "split", rep);
    TrainTestSplit tts;
    tts.test_items_by_user.resize(graph.num_users());
    std::vector<std::pair<Index, Index>> train_edges, test_edges;
    train_edges.reserve(graph.num_edges());
    for (Index u = 0; u < graph.num_users(); ++u) {
      const auto items = graph.items_of(u);
      const Index deg = static_cast<Index>(items.size());
      Index n_test = 0;
      if (deg >= spec.min_interactions) {
        n_test = static_cast<Index>(std::floor(spec.test_fraction * deg + 0.5));  // half-up
        n_test = std::max<Index>(1, std::min<Index>(n_test, deg - 1));
      }
      if (n_test == 0) {
        for (Index i : items) train_edges.emplace_back(u, i);
        continue;
      }
      std::vector<Index> pool(items.begin(), items.end());
      Rng rng(derive_seed(rep_seed, "user", static_cast<std::uint64_t>(u)));
      for (Index j = 0; j < n_test; ++j) {
        const std::uint64_t pick = j + rng.below(pool.size() - j);
        std::swap(pool[j], pool[pick]);
      }
      auto& test = tts.test_items_by_user[u];
      test.assign(pool.begin(), pool.begin() + n_test);
      std::sort(test.begin(), test.end());
      for (Index i : test) test_edges.emplace_back(u, i);
      for (auto it = pool.begin() + n_test; it != pool.end(); ++it) {
        train_edges.emplace_back(u, *it);
      }
    }
    std::sort(test_edges.begin(), test_edges.end());
    tts.num_test_edges = static_cast<std::int64_t>(test_edges.size());
    tts.fingerprint = detail::fingerprint_edges(test_edges);
    tts.train = FeedbackGraph::from_indexed_edges(graph.user_ids(), graph.item_ids(),
                                                  std::move(train_edges));
    out.push_back(std::move(tts));
  }
  return out;
}

}  // namespace rwe
