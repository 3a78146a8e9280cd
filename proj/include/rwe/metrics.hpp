#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "rwe/errors.hpp"
#include "rwe/graph.hpp"
#include "rwe/ideology.hpp"
#include "rwe/random.hpp"
#include "rwe/recommend.hpp"

namespace rwe {

struct AccuracyMetrics {
  double auc = 0.0;
  double hit_rate = 0.0;   // test items recovered in the top cutoff / all test items
  double precision = 0.0;  // test items in the top cutoff / (cutoff * users)
  double mean_rank = 0.0;  // 1-based rank of test items among non-train candidates
  long users_evaluated = 0;
};

/// Streaming accuracy over full candidate rankings. Users with empty test
/// sets are skipped. AUC counts tied (positive, negative) pairs as half.
class AccuracyAccumulator {
 public:
  explicit AccuracyAccumulator(int cutoff = 10) : cutoff_(cutoff) {}

  void add_user(const RankedList& full_ranking, const std::vector<Index>& test_sorted) {
    if (test_sorted.empty()) return;
    const auto& entries = full_ranking.entries;
    auto is_test = [&](Index item) {
      return std::binary_search(test_sorted.begin(), test_sorted.end(), item);
    };
    long long positives = 0;
    for (std::size_t r = 0; r < entries.size(); ++r) {
      if (is_test(entries[r].first)) {
        ++positives;
        rank_sum_ += static_cast<double>(r + 1);
        if (static_cast<int>(r) < cutoff_) ++hits_;
      }
    }
    if (positives == 0) return;  // test items absent from the candidate pool
    test_total_ += positives;
    const long long negatives = static_cast<long long>(entries.size()) - positives;
    ++users_;
    if (negatives == 0) return;  // no pairs to order; AUC undefined for this user
    ++auc_users_;
    // Walk tie groups from the top; a positive beats the negatives ranked in
    // strictly lower groups and half of those tied with it.
    double correct = 0.0;
    long long neg_seen = 0;
    std::size_t g = 0;
    while (g < entries.size()) {
      std::size_t h = g;
      long long pos_g = 0, neg_g = 0;
      const double score = entries[g].second;
      while (h < entries.size() && entries[h].second == score) {
        if (is_test(entries[h].first)) ++pos_g;
        else ++neg_g;
        ++h;
      }
      const long long neg_below = negatives - neg_seen - neg_g;
      correct += static_cast<double>(pos_g) *
                 (static_cast<double>(neg_below) + 0.5 * static_cast<double>(neg_g));
      neg_seen += neg_g;
      g = h;
    }
    auc_sum_ += correct / (static_cast<double>(positives) * static_cast<double>(negatives));
  }

  void merge(const AccuracyAccumulator& o) {
    auc_sum_ += o.auc_sum_;
    rank_sum_ += o.rank_sum_;
    hits_ += o.hits_;
    test_total_ += o.test_total_;
    users_ += o.users_;
    auc_users_ += o.auc_users_;
  }

  AccuracyMetrics finalize() const {
    if (users_ == 0) throw DataError("accuracy_metrics: no users with test items");
    AccuracyMetrics m;
    m.users_evaluated = users_;
    m.auc = auc_users_ == 0 ? std::nan("") : auc_sum_ / static_cast<double>(auc_users_);
    m.hit_rate = static_cast<double>(hits_) / static_cast<double>(test_total_);
    m.precision = static_cast<double>(hits_) /
                  (static_cast<double>(cutoff_) * static_cast<double>(users_));
    m.mean_rank = rank_sum_ / static_cast<double>(test_total_);
    return m;
  }

 private:
  int cutoff_;
  double auc_sum_ = 0.0, rank_sum_ = 0.0;
  long long hits_ = 0, test_total_ = 0;
  long users_ = 0, auc_users_ = 0;
};

inline AccuracyMetrics accuracy_metrics(const std::vector<RankedList>& full_rankings,
                                        const std::vector<std::vector<Index>>& test_by_user,
                                        int cutoff = 10) {
  AccuracyAccumulator acc(cutoff);
  for (const auto& list : full_rankings) acc.add_user(list, test_by_user[list.user]);
  return acc.finalize();
}

struct LongtailMetrics {
  double gini_diversity = 0.0;  // 1 - Gini of recommendation counts, zeros included
  double avg_degree = 0.0;      // mean training degree over list slots
  double personalization = 0.0; // 1 - mean pairwise list overlap / cutoff
  double surprisal = 0.0;       // mean -log2(degree / num_users) over slots
  bool personalization_sampled = false;
};

/// Streaming long-tail diversity at a fixed cutoff. Pairwise personalization
/// is exact up to 2000 users, then 100k sampled pairs under the given seed.
class LongtailAccumulator {
 public:
  static constexpr long kExactPairUserLimit = 2000;
  static constexpr long long kSampledPairs = 100'000;

  LongtailAccumulator(int cutoff, const FeedbackGraph& train)
      : cutoff_(cutoff), num_items_(train.num_items()), num_users_(train.num_users()) {
    degrees_.resize(num_items_);
    for (Index i = 0; i < num_items_; ++i) degrees_[i] = train.item_degree(i);
    counts_.assign(num_items_, 0);
  }

  void add_user(const RankedList& topk) {
    const std::size_t take = std::min<std::size_t>(topk.entries.size(), cutoff_);
    if (take == 0) return;
    std::vector<Index> items(take);
    for (std::size_t r = 0; r < take; ++r) {
      const Index j = topk.entries[r].first;
      items[r] = j;
      ++counts_[j];
      const double deg = static_cast<double>(degrees_[j]);
      avgdeg_sum_ += deg;
      surp_sum_ += -std::log2(std::max(deg, 1.0) / static_cast<double>(num_users_));
      ++slots_;
    }
    std::sort(items.begin(), items.end());
    lists_.emplace_back(topk.user, std::move(items));
  }

  void merge(LongtailAccumulator& o) {
    for (Index i = 0; i < num_items_; ++i) counts_[i] += o.counts_[i];
    avgdeg_sum_ += o.avgdeg_sum_;
    surp_sum_ += o.surp_sum_;
    slots_ += o.slots_;
    lists_.insert(lists_.end(), std::make_move_iterator(o.lists_.begin()),
                  std::make_move_iterator(o.lists_.end()));
  }

  LongtailMetrics finalize(std::uint64_t pers_seed = 0) const {
    if (slots_ == 0) throw DataError("longtail_metrics: no recommendations");
    LongtailMetrics m;
    m.avg_degree = avgdeg_sum_ / static_cast<double>(slots_);
    m.surprisal = surp_sum_ / static_cast<double>(slots_);
    m.gini_diversity = 1.0 - gini(counts_);

    std::vector<const std::vector<Index>*> lists(lists_.size());
    {
      std::vector<std::pair<Index, const std::vector<Index>*>> order;
      order.reserve(lists_.size());
      for (const auto& [user, items] : lists_) order.emplace_back(user, &items);
      std::sort(order.begin(), order.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t k = 0; k < order.size(); ++k) lists[k] = order[k].second;
    }
    const long users = static_cast<long>(lists.size());
    if (users < 2) {
      m.personalization = 0.0;
      return m;
    }
    double overlap_sum = 0.0;
    long long pairs = 0;
    if (users <= kExactPairUserLimit) {
      for (long a = 0; a < users; ++a) {
        for (long b = a + 1; b < users; ++b) {
          overlap_sum += overlap(*lists[a], *lists[b]);
          ++pairs;
        }
      }
    } else {
      m.personalization_sampled = true;
      Rng rng(derive_seed(pers_seed, "personalization"));
      for (long long k = 0; k < kSampledPairs; ++k) {
        const long a = static_cast<long>(rng.below(users));
        long b = static_cast<long>(rng.below(users - 1));
        if (b >= a) ++b;
        overlap_sum += overlap(*lists[a], *lists[b]);
        ++pairs;
      }
    }
    m.personalization =
        1.0 - overlap_sum / (static_cast<double>(pairs) * static_cast<double>(cutoff_));
    return m;
  }

 private:
  static double overlap(const std::vector<Index>& a, const std::vector<Index>& b) {
    std::size_t ia = 0, ib = 0;
    long common = 0;
    while (ia < a.size() && ib < b.size()) {
      if (a[ia] < b[ib]) ++ia;
      else if (b[ib] < a[ia]) ++ib;
      else { ++common; ++ia; ++ib; }
    }
    return static_cast<double>(common);
  }

  /// Standard Gini coefficient; uniform counts give 0.
  static double gini(const std::vector<std::int64_t>& raw) {
    std::vector<std::int64_t> x(raw);
    std::sort(x.begin(), x.end());
    long double total = 0.0L, weighted = 0.0L;
    const long double n = static_cast<long double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      total += x[i];
      weighted += (2.0L * (i + 1) - n - 1.0L) * x[i];
    }
    if (total == 0.0L) return 0.0;
    return static_cast<double>(weighted / (n * total));
  }

  int cutoff_;
  Index num_items_, num_users_;
  std::vector<Index> degrees_;
  std::vector<std::int64_t> counts_;
  std::vector<std::pair<Index, std::vector<Index>>> lists_;
  double avgdeg_sum_ = 0.0, surp_sum_ = 0.0;
  long long slots_ = 0;
};

inline LongtailMetrics longtail_metrics(const std::vector<RankedList>& topk_lists,
                                        const FeedbackGraph& train, int cutoff = 20,
                                        std::uint64_t pers_seed = 0) {
  LongtailAccumulator acc(cutoff, train);
  for (const auto& list : topk_lists) acc.add_user(list);
  return acc.finalize(pers_seed);
}

namespace detail {

inline double position_or_throw(const std::vector<double>& positions, Index item) {
  const double p = positions[item];
  if (std::isnan(p)) {
    throw DataError("metrics: no ideological position for item index " +
                    std::to_string(item));
  }
  return p;
}

}  // namespace detail

/// Mean over users of the spread (max - min) of ideological positions in the
/// top-k list; users with fewer than two recommended items contribute 0.
inline double rec_range(const std::vector<RankedList>& topk_lists,
                        const std::vector<double>& item_positions) {
  if (topk_lists.empty()) throw DataError("rec_range: no users");
  double sum = 0.0;
  for (const auto& list : topk_lists) {
    if (list.entries.size() < 2) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& [item, score] : list.entries) {
      const double p = detail::position_or_throw(item_positions, item);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    sum += hi - lo;
  }
  return sum / static_cast<double>(topk_lists.size());
}

struct BatteryMetrics {
  double rec_pos = 0.0;      // mean position of the top-k recommendations
  double train_pos = 0.0;    // mean position of the training items
  double user_shift = 0.0;   // rec_pos - theta_u
  double train_shift = 0.0;  // rec_pos - train_pos
  double rec_range = 0.0;    // max - min of top-k positions
  double uw_recs = 0.0;      // theta_u * rec_pos
  double uw_shift = 0.0;     // theta_u * user_shift
  double tw_recs = 0.0;      // train_pos * rec_pos
  double tw_shift = 0.0;     // train_pos * train_shift
  double uw_range = 0.0;     // |theta_u| * rec_range
  long users_evaluated = 0;
};

/// Per-user ideological diversity battery, averaged over users that have at
/// least one recommendation and one training item with known positions.
class BatteryAccumulator {
 public:
  explicit BatteryAccumulator(int cutoff = std::numeric_limits<int>::max())
      : cutoff_(cutoff) {}

  void add_user(const RankedList& topk, const std::vector<Index>& train_items,
                double theta_u, const std::vector<double>& item_positions) {
    const std::size_t take = std::min<std::size_t>(topk.entries.size(), cutoff_);
    if (take == 0 || train_items.empty()) return;
    double rec_sum = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t r = 0; r < take; ++r) {
      const double p = detail::position_or_throw(item_positions, topk.entries[r].first);
      rec_sum += p;
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    const double rec_pos = rec_sum / static_cast<double>(take);
    double train_sum = 0.0;
    for (Index item : train_items) {
      train_sum += detail::position_or_throw(item_positions, item);
    }
    const double train_pos = train_sum / static_cast<double>(train_items.size());
    const double range = take < 2 ? 0.0 : hi - lo;
    const double user_shift = rec_pos - theta_u;
    const double train_shift = rec_pos - train_pos;
    sums_.rec_pos += rec_pos;
    sums_.train_pos += train_pos;
    sums_.user_shift += user_shift;
    sums_.train_shift += train_shift;
    sums_.rec_range += range;
    sums_.uw_recs += theta_u * rec_pos;
    sums_.uw_shift += theta_u * user_shift;
    sums_.tw_recs += train_pos * rec_pos;
    sums_.tw_shift += train_pos * train_shift;
    sums_.uw_range += std::abs(theta_u) * range;
    ++sums_.users_evaluated;
  }

  void merge(const BatteryAccumulator& o) {
    sums_.rec_pos += o.sums_.rec_pos;
    sums_.train_pos += o.sums_.train_pos;
    sums_.user_shift += o.sums_.user_shift;
    sums_.train_shift += o.sums_.train_shift;
    sums_.rec_range += o.sums_.rec_range;
    sums_.uw_recs += o.sums_.uw_recs;
    sums_.uw_shift += o.sums_.uw_shift;
    sums_.tw_recs += o.sums_.tw_recs;
    sums_.tw_shift += o.sums_.tw_shift;
    sums_.uw_range += o.sums_.uw_range;
    sums_.users_evaluated += o.sums_.users_evaluated;
  }

  BatteryMetrics finalize() const {
    if (sums_.users_evaluated == 0) {
      throw DataError("ideological_battery: no users with positions");
    }
    BatteryMetrics m = sums_;
    const double n = static_cast<double>(sums_.users_evaluated);
    m.rec_pos /= n;
    m.train_pos /= n;
    m.user_shift /= n;
    m.train_shift /= n;
    m.rec_range /= n;
    m.uw_recs /= n;
    m.uw_shift /= n;
    m.tw_recs /= n;
    m.tw_shift /= n;
    m.uw_range /= n;
    return m;
  }

 private:
  int cutoff_;
  BatteryMetrics sums_;
};

inline BatteryMetrics ideological_battery(
    const std::vector<RankedList>& topk_lists,
    const std::vector<std::vector<Index>>& train_items_by_user,
    const std::vector<double>& theta_by_user, const std::vector<double>& item_positions) {
  BatteryAccumulator acc;
  for (const auto& list : topk_lists) {
    acc.add_user(list, train_items_by_user[list.user], theta_by_user[list.user],
                 item_positions);
  }
  return acc.finalize();
}

/// Per-leaning histogram of position values over a shared range, for
/// external plotting of the recommendation density comparison.
struct HistogramTable {
  double lo = 0.0, hi = 0.0;
  int bins = 0;
  std::array<std::vector<long long>, 3> counts;  // Left, Center, Right

  void write_tsv(std::ostream& os) const {
    os << "bin_lo\tbin_hi\tleft\tcenter\tright\n";
    const double width = (hi - lo) / bins;
    char buf[64];
    for (int b = 0; b < bins; ++b) {
      std::snprintf(buf, sizeof(buf), "%.10g\t%.10g", lo + b * width, lo + (b + 1) * width);
      os << buf << '\t' << counts[0][b] << '\t' << counts[1][b] << '\t' << counts[2][b]
         << '\n';
    }
  }
};

inline HistogramTable histogram_export(const std::vector<double>& values,
                                       const std::vector<Leaning>& classes, int bins) {
  if (bins < 2) throw std::invalid_argument("histogram_export: bins must be >= 2");
  if (values.size() != classes.size()) {
    throw std::invalid_argument("histogram_export: values/classes length mismatch");
  }
  if (values.empty()) throw DataError("histogram_export: no values");
  HistogramTable t;
  t.bins = bins;
  t.lo = *std::min_element(values.begin(), values.end());
  t.hi = *std::max_element(values.begin(), values.end());
  if (t.hi == t.lo) t.hi = t.lo + 1.0;  // all values in the first bin
  for (auto& c : t.counts) c.assign(bins, 0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    int b = static_cast<int>((values[k] - t.lo) / (t.hi - t.lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    int cls = classes[k] == Leaning::Left ? 0 : (classes[k] == Leaning::Center ? 1 : 2);
    ++t.counts[cls][b];
  }
  return t;
}

}  // namespace rwe
