#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rwe/dataset.hpp"
#include "rwe/erasure.hpp"
#include "rwe/graph.hpp"
#include "rwe/ideology.hpp"
#include "rwe/metrics.hpp"
#include "rwe/parallel.hpp"
#include "rwe/recommend.hpp"
#include "rwe/report.hpp"
#include "rwe/split.hpp"
#include "rwe/stats.hpp"
#include "rwe/walk.hpp"

namespace rwe {

enum class Algorithm { P3, Rp3b, ItemKnn, RweD, RweB };

inline Algorithm algorithm_from_name(const std::string& name) {
  if (name == "p3") return Algorithm::P3;
  if (name == "rp3b") return Algorithm::Rp3b;
  if (name == "itemknn") return Algorithm::ItemKnn;
  if (name == "rwe-d") return Algorithm::RweD;
  if (name == "rwe-b") return Algorithm::RweB;
  throw DataError("unknown algorithm '" + name +
                  "' (expected p3, rp3b, itemknn, rwe-d or rwe-b)");
}

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::P3: return "p3";
    case Algorithm::Rp3b: return "rp3b";
    case Algorithm::ItemKnn: return "itemknn";
    case Algorithm::RweD: return "rwe-d";
    default: return "rwe-b";
  }
}

struct ExperimentConfig {
  std::filesystem::path dataset;
  DatasetFormat format = DatasetFormat::TsvEdges;
  Algorithm algorithm = Algorithm::P3;

  std::vector<double> beta_grid{0.7};    // rp3b, rwe-d
  std::vector<double> nu_grid{1.0};      // rwe-d, rwe-b
  std::vector<int> neighbors_grid{50};   // itemknn
  double epsilon = 0.9;
  int walk_k = 3;
  int iterations = 10;

  int min_user_degree = 1;
  int min_item_degree = 1;
  SplitSpec split_spec;
  std::filesystem::path positions;  // required for rwe-b and ideological metrics
  std::filesystem::path outdir;
  std::uint64_t seed = 0;
  int list_length = 100;  // persisted ranked-list length
};

struct GridPoint {
  std::vector<std::pair<std::string, double>> params;

  std::string dirname() const {
    if (params.empty()) return "default";
    std::string s;
    for (const auto& [k, v] : params) {
      if (!s.empty()) s += '_';
      s += k + "=" + format_score(v);
    }
    return s;
  }

  double get(const std::string& key) const {
    for (const auto& [k, v] : params) {
      if (k == key) return v;
    }
    throw std::invalid_argument("grid point has no parameter '" + key + "'");
  }
};

inline std::vector<GridPoint> enumerate_grid(const ExperimentConfig& cfg) {
  std::vector<GridPoint> grid;
  switch (cfg.algorithm) {
    case Algorithm::P3:
      grid.push_back({});
      break;
    case Algorithm::Rp3b:
      for (double b : cfg.beta_grid) grid.push_back({{{"beta", b}}});
      break;
    case Algorithm::ItemKnn:
      for (int k : cfg.neighbors_grid) {
        grid.push_back({{{"neighbors", static_cast<double>(k)}}});
      }
      break;
    case Algorithm::RweD:
      for (double b : cfg.beta_grid) {
        for (double nu : cfg.nu_grid) grid.push_back({{{"beta", b}, {"nu", nu}}});
      }
      break;
    case Algorithm::RweB:
      for (double nu : cfg.nu_grid) grid.push_back({{{"nu", nu}}});
      break;
  }
  if (grid.empty()) throw DataError("empty hyperparameter grid for the selected algorithm");
  return grid;
}

/// Per-entity ideological positions resolved onto a graph's index space;
/// NaN marks a missing position.
struct GraphPositions {
  std::vector<double> users, items;
};

inline GraphPositions resolve_positions(const FeedbackGraph& graph, const PositionTable& table) {
  GraphPositions p;
  p.users.resize(graph.num_users());
  p.items.resize(graph.num_items());
  for (Index u = 0; u < graph.num_users(); ++u) {
    p.users[u] = table.user_position(graph.user_id(u));
  }
  for (Index i = 0; i < graph.num_items(); ++i) {
    p.items[i] = table.item_position(graph.item_id(i));
  }
  return p;
}

namespace detail {

inline std::uint64_t hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read artifact for hashing: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize k = 0; k < got; ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace detail

/// Writes <outdir>/MANIFEST: one "<hash>  <relative path>" line per artifact,
/// sorted by path. A failed run appends an INCOMPLETE marker instead of
/// silently leaving partial outputs.
inline void write_manifest(const std::filesystem::path& outdir,
                           const std::string& incomplete_note = "") {
  std::vector<std::string> rels;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(outdir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), outdir).generic_string();
    if (rel == "MANIFEST") continue;
    rels.push_back(rel);
  }
  std::sort(rels.begin(), rels.end());
  std::ofstream out(outdir / "MANIFEST", std::ios::binary);
  for (const auto& rel : rels) {
    out << hex_u64(detail::hash_file(outdir / rel)) << "  " << rel << '\n';
  }
  if (!incomplete_note.empty()) {
    out << "INCOMPLETE " << incomplete_note << '\n';
  }
}

namespace detail {

struct SplitEvaluation {
  std::map<std::string, double> metrics;
  std::vector<RankedList> persisted;  // per user, truncated to list_length
};

/// Scores every user of one train/test split with one configured backend and
/// reduces the metric accumulators deterministically (fixed chunk order).
inline SplitEvaluation evaluate_split(const ExperimentConfig& cfg, const GridPoint& gp,
                                      const TrainTestSplit& tts, int split_index,
                                      const GraphPositions* positions) {
  const FeedbackGraph& train = tts.train;
  const Index m = train.num_users(), n = train.num_items();
  const TransitionMatrix P(train);

  std::optional<ItemSimilarityIndex> knn;
  std::optional<ErasureMatrix> erasure;
  switch (cfg.algorithm) {
    case Algorithm::ItemKnn:
      knn.emplace(train, static_cast<int>(gp.get("neighbors")));
      break;
    case Algorithm::RweD:
      erasure = erasure_longtail(train, gp.get("beta")).with_nu(gp.get("nu"));
      break;
    case Algorithm::RweB: {
      if (positions == nullptr) throw DataError("rwe-b requires a positions file");
      for (Index u = 0; u < m; ++u) {
        if (std::isnan(positions->users[u])) {
          throw DataError("rwe-b: no position for user '" + train.user_id(u) + "'");
        }
      }
      for (Index i = 0; i < n; ++i) {
        if (std::isnan(positions->items[i])) {
          throw DataError("rwe-b: no position for item '" + train.item_id(i) + "'");
        }
      }
      erasure = erasure_bridge(positions->users, positions->items, cfg.epsilon,
                               gp.get("nu"));
      break;
    }
    default:
      break;
  }

  auto score_user = [&](Index u) -> ScoreMap {
    switch (cfg.algorithm) {
      case Algorithm::P3: return p3_score(P, u);
      case Algorithm::Rp3b: return rp3b_score(P, train, u, gp.get("beta"));
      case Algorithm::ItemKnn: return itemknn_score(*knn, train, u);
      default: return rwe_score(P, *erasure, u, cfg.walk_k, cfg.iterations).scores;
    }
  };

  SplitEvaluation result;
  result.persisted.assign(m, RankedList{});
  const std::size_t chunk_count = std::min<std::size_t>(kParallelChunks, m);
  std::vector<AccuracyAccumulator> acc(chunk_count, AccuracyAccumulator(10));
  std::vector<LongtailAccumulator> longtail(chunk_count, LongtailAccumulator(20, train));
  std::vector<BatteryAccumulator> battery(chunk_count, BatteryAccumulator(10));
  std::vector<double> range_sum(chunk_count, 0.0);

  parallel_chunks(static_cast<std::size_t>(m), [&](std::size_t chunk, std::size_t begin,
                                                   std::size_t end) {
    for (std::size_t uu = begin; uu < end; ++uu) {
      const Index u = static_cast<Index>(uu);
      const auto items = train.items_of(u);
      const std::vector<Index> train_items(items.begin(), items.end());
      RankedList full = rank_all_candidates(score_user(u), n, train_items, u);
      acc[chunk].add_user(full, tts.test_items_by_user[u]);
      longtail[chunk].add_user(full);  // uses the top 20 slots
      if (positions != nullptr) {
        RankedList top10{u,
                         {full.entries.begin(),
                          full.entries.begin() +
                              std::min<std::size_t>(full.entries.size(), 10)}};
        range_sum[chunk] += rec_range({std::move(top10)}, positions->items);
        if (!std::isnan(positions->users[u])) {
          battery[chunk].add_user(full, train_items, positions->users[u],
                                  positions->items);
        }
      }
      full.entries.resize(std::min<std::size_t>(full.entries.size(), cfg.list_length));
      result.persisted[uu] = std::move(full);
    }
  });

  for (std::size_t c = 1; c < chunk_count; ++c) {
    acc[0].merge(acc[c]);
    longtail[0].merge(longtail[c]);
    battery[0].merge(battery[c]);
    range_sum[0] += range_sum[c];
  }

  auto& metrics = result.metrics;
  const AccuracyMetrics a = acc[0].finalize();
  if (!std::isnan(a.auc)) metrics["AUC"] = a.auc;
  metrics["HR@10"] = a.hit_rate;
  metrics["P@10"] = a.precision;
  metrics["MR"] = a.mean_rank;
  const LongtailMetrics lt =
      longtail[0].finalize(derive_seed(cfg.seed, "personalization", split_index));
  metrics["GiniD@20"] = lt.gini_diversity;
  metrics["AvgDeg@20"] = lt.avg_degree;
  metrics["Pers@20"] = lt.personalization;
  metrics["Surp@20"] = lt.surprisal;
  if (positions != nullptr) {
    const BatteryMetrics b = battery[0].finalize();
    metrics["RecRange@10"] = range_sum[0] / static_cast<double>(m);
    metrics["Rec-pos@10"] = b.rec_pos;
    metrics["Train-pos@10"] = b.train_pos;
    metrics["User-shift@10"] = b.user_shift;
    metrics["Train-shift@10"] = b.train_shift;
    metrics["Rec-range@10"] = b.rec_range;
    metrics["UW-Recs@10"] = b.uw_recs;
    metrics["UW-Shift@10"] = b.uw_shift;
    metrics["TW-Recs@10"] = b.tw_recs;
    metrics["TW-Shift@10"] = b.tw_shift;
    metrics["UW-Range@10"] = b.uw_range;
  }
  return result;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write artifact: " + path.string());
  out << content;
}

}  // namespace detail

struct ExperimentResult {
  EvalReport best;
  std::vector<EvalReport> all;
  std::filesystem::path algo_dir;
};

/// Full grid-search experiment: for every grid point and split, builds the
/// train graph, scores, evaluates, and persists ranked lists; the grid point
/// with the best mean AUC wins. All artifacts land under
/// <outdir>/<algorithm>/ and are listed in <outdir>/MANIFEST.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  if (cfg.outdir.empty()) throw DataError("run_experiment: no output directory configured");
  fs::create_directories(cfg.outdir);
  std::string stage = "setup";
  try {
    stage = "ingest";
    const auto records = parse_dataset(cfg.dataset, cfg.format);
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(records.size());
    for (const auto& r : records) pairs.emplace_back(r.user_id, r.item_id);
    const FeedbackGraph graph =
        FeedbackGraph::build(pairs, cfg.min_user_degree, cfg.min_item_degree);

    stage = "split";
    SplitSpec spec = cfg.split_spec;
    spec.seed = cfg.seed;
    const auto splits = split(graph, spec);

    stage = "positions";
    std::optional<GraphPositions> positions;
    if (!cfg.positions.empty()) {
      std::ifstream in(cfg.positions);
      if (!in) throw DataError("cannot open positions file: " + cfg.positions.string());
      const PositionTable table = PositionTable::read_tsv(in, cfg.positions.filename().string());
      positions = resolve_positions(graph, table);
    } else if (cfg.algorithm == Algorithm::RweB) {
      throw DataError("rwe-b requires a positions file");
    }

    stage = "grid";
    const auto grid = enumerate_grid(cfg);
    const fs::path algo_dir = cfg.outdir / algorithm_name(cfg.algorithm);
    fs::create_directories(algo_dir);

    ExperimentResult result;
    result.algo_dir = algo_dir;
    for (const auto& gp : grid) {
      stage = "evaluate " + gp.dirname();
      EvalReport report;
      report.algorithm = algorithm_name(cfg.algorithm);
      report.gridpoint = gp.dirname();
      for (const auto& [k, v] : gp.params) report.hyperparameters[k] = format_score(v);
      if (cfg.algorithm == Algorithm::RweB) {
        report.hyperparameters["epsilon"] = format_score(cfg.epsilon);
      }
      if (cfg.algorithm == Algorithm::RweB || cfg.algorithm == Algorithm::RweD) {
        report.hyperparameters["k"] = std::to_string(cfg.walk_k);
        report.hyperparameters["iterations"] = std::to_string(cfg.iterations);
      }
      report.seed = cfg.seed;
      const fs::path gp_dir = algo_dir / gp.dirname();
      for (std::size_t s = 0; s < splits.size(); ++s) {
        auto eval = detail::evaluate_split(cfg, gp, splits[s], static_cast<int>(s),
                                           positions ? &*positions : nullptr);
        report.split_fingerprints.push_back(splits[s].fingerprint);
        report.per_split.push_back(std::move(eval.metrics));
        const fs::path split_dir = gp_dir / ("split-" + std::to_string(s));
        fs::create_directories(split_dir);
        std::ofstream ranked(split_dir / "ranked.tsv", std::ios::binary);
        write_ranked_tsv(ranked, graph, eval.persisted);
      }
      report.compute_averages();
      detail::write_text_file(gp_dir / "report.json", report.to_json().dump(2) + "\n");
      result.all.push_back(std::move(report));
    }

    stage = "select";
    auto mean_auc = [](const EvalReport& r) {
      const auto it = r.averaged.find("AUC");
      return it == r.averaged.end() ? -std::numeric_limits<double>::infinity()
                                    : it->second;
    };
    std::size_t best = 0;
    for (std::size_t g = 1; g < result.all.size(); ++g) {
      if (mean_auc(result.all[g]) > mean_auc(result.all[best])) best = g;
    }
    result.best = result.all[best];
    detail::write_text_file(algo_dir / "best.json", result.best.to_json().dump(2) + "\n");

    std::ostringstream summary;
    {
      std::vector<std::string> columns;
      for (const auto& [name, value] : result.all.front().averaged) columns.push_back(name);
      summary << "gridpoint";
      for (const auto& c : columns) summary << '\t' << c;
      summary << '\n';
      for (const auto& rep : result.all) {
        summary << rep.gridpoint;
        char buf[40];
        for (const auto& c : columns) {
          std::snprintf(buf, sizeof(buf), "%.6f", rep.averaged.at(c));
          summary << '\t' << buf;
        }
        summary << '\n';
      }
    }
    detail::write_text_file(algo_dir / "grid_summary.tsv", summary.str());

    stage = "manifest";
    write_manifest(cfg.outdir);
    return result;
  } catch (const std::exception& e) {
    try {
      write_manifest(cfg.outdir, "stage=" + stage + ": " + e.what());
    } catch (...) {
      // the original error is the one worth reporting
    }
    throw DataError("experiment failed at stage '" + stage + "': " + e.what());
  }
}

/// Metrics for externally produced ranked lists against one regenerated
/// split. AUC and MR need the complete candidate ranking and are emitted only
/// when every provided list covers all non-train items of its user; the
/// cutoff metrics always come from the list prefixes.
inline std::map<std::string, double> evaluate_external_lists(
    const std::vector<RankedList>& lists, const TrainTestSplit& tts,
    const GraphPositions* positions) {
  if (lists.empty()) throw DataError("evaluate: no ranked lists provided");
  const FeedbackGraph& train = tts.train;
  bool complete = true;
  for (const auto& list : lists) {
    if (static_cast<Index>(list.entries.size()) !=
        train.num_items() - train.user_degree(list.user)) {
      complete = false;
      break;
    }
  }
  std::map<std::string, double> metrics;
  if (complete) {
    AccuracyAccumulator acc(10);
    for (const auto& list : lists) acc.add_user(list, tts.test_items_by_user[list.user]);
    const AccuracyMetrics a = acc.finalize();
    if (!std::isnan(a.auc)) metrics["AUC"] = a.auc;
    metrics["HR@10"] = a.hit_rate;
    metrics["P@10"] = a.precision;
    metrics["MR"] = a.mean_rank;
  } else {
    long long hits = 0, test_total = 0;
    long users = 0;
    for (const auto& list : lists) {
      const auto& test = tts.test_items_by_user[list.user];
      if (test.empty()) continue;
      ++users;
      test_total += static_cast<long long>(test.size());
      const std::size_t take = std::min<std::size_t>(list.entries.size(), 10);
      for (std::size_t r = 0; r < take; ++r) {
        if (std::binary_search(test.begin(), test.end(), list.entries[r].first)) ++hits;
      }
    }
    if (users == 0) throw DataError("evaluate: no listed user has test items");
    metrics["HR@10"] = static_cast<double>(hits) / static_cast<double>(test_total);
    metrics["P@10"] = static_cast<double>(hits) / (10.0 * static_cast<double>(users));
  }
  LongtailAccumulator longtail(20, train);
  for (const auto& list : lists) longtail.add_user(list);
  const LongtailMetrics lt = longtail.finalize(tts.fingerprint);
  metrics["GiniD@20"] = lt.gini_diversity;
  metrics["AvgDeg@20"] = lt.avg_degree;
  metrics["Pers@20"] = lt.personalization;
  metrics["Surp@20"] = lt.surprisal;
  if (positions != nullptr) {
    BatteryAccumulator battery(10);
    double range_sum = 0.0;
    for (const auto& list : lists) {
      RankedList top10 = list;
      top10.entries.resize(std::min<std::size_t>(top10.entries.size(), 10));
      range_sum += rec_range({top10}, positions->items);
      const auto items = train.items_of(list.user);
      if (!std::isnan(positions->users[list.user])) {
        battery.add_user(list, {items.begin(), items.end()}, positions->users[list.user],
                         positions->items);
      }
    }
    const BatteryMetrics b = battery.finalize();
    metrics["RecRange@10"] = range_sum / static_cast<double>(lists.size());
    metrics["Rec-pos@10"] = b.rec_pos;
    metrics["Train-pos@10"] = b.train_pos;
    metrics["User-shift@10"] = b.user_shift;
    metrics["Train-shift@10"] = b.train_shift;
    metrics["Rec-range@10"] = b.rec_range;
    metrics["UW-Recs@10"] = b.uw_recs;
    metrics["UW-Shift@10"] = b.uw_shift;
    metrics["TW-Recs@10"] = b.tw_recs;
    metrics["TW-Shift@10"] = b.tw_shift;
    metrics["UW-Range@10"] = b.uw_range;
  }
  return metrics;
}

/// One generic row of the ranked-list interchange TSV.
struct RankedRow {
  std::string user_id;
  int rank;
  std::string item_id;
  double score;
};

inline std::vector<RankedRow> read_ranked_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ranked list file: " + path.string());
  std::vector<RankedRow> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(lineno);
    RankedRow row;
    std::size_t pos = 0;
    std::array<std::string, 4> f;
    for (int k = 0; k < 4; ++k) {
      const auto tab = line.find('\t', pos);
      if (k < 3 && tab == std::string::npos) {
        throw DataError(where + ": expected 4 tab-separated fields");
      }
      f[k] = line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos);
      pos = tab + 1;
    }
    row.user_id = f[0];
    row.item_id = f[2];
    try {
      row.rank = std::stoi(f[1]);
      row.score = std::stod(f[3]);
    } catch (const std::exception&) {
      throw DataError(where + ": malformed rank or score");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct ComparisonRow {
  std::string metric;
  double mean_a = 0.0, mean_b = 0.0;
  double t = 0.0, df = 0.0, p_value = 1.0;
  std::string stars;
};

struct Comparison {
  std::vector<ComparisonRow> welch;
  bool has_ks = false;
  KsResult ks;  // pooled top-10 recommendation positions, run A vs run B
};

inline std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

namespace detail {

inline std::vector<double> pooled_top10_positions(const std::filesystem::path& algo_dir,
                                                  const EvalReport& report,
                                                  const PositionTable& table) {
  std::vector<double> pooled;
  for (std::size_t s = 0; s < report.per_split.size(); ++s) {
    const auto path =
        algo_dir / report.gridpoint / ("split-" + std::to_string(s)) / "ranked.tsv";
    for (const auto& row : read_ranked_rows(path)) {
      if (row.rank > 10) continue;
      const double p = table.item_position(row.item_id);
      if (std::isnan(p)) {
        throw DataError("compare: no position for item '" + row.item_id + "'");
      }
      pooled.push_back(p);
    }
  }
  return pooled;
}

}  // namespace detail

/// Statistical comparison of two runs evaluated on identical splits: Welch
/// one-tailed tests (run A better) on the requested per-split metrics, plus a
/// KS test on the pooled top-10 position samples when positions are given.
inline Comparison compare_runs(const std::filesystem::path& algo_dir_a,
                               const std::filesystem::path& algo_dir_b,
                               const std::vector<std::string>& metrics,
                               const PositionTable* positions = nullptr) {
  auto load = [](const std::filesystem::path& dir) {
    std::ifstream in(dir / "best.json");
    if (!in) throw DataError("cannot open report: " + (dir / "best.json").string());
    nlohmann::json j;
    in >> j;
    return EvalReport::from_json(j);
  };
  const EvalReport a = load(algo_dir_a);
  const EvalReport b = load(algo_dir_b);
  if (a.split_fingerprints != b.split_fingerprints) {
    throw DataError("compare: split fingerprints differ; runs used different splits");
  }
  Comparison cmp;
  for (const auto& metric : metrics) {
    const auto va = a.split_values(metric);
    const auto vb = b.split_values(metric);
    ComparisonRow row;
    row.metric = metric;
    for (double v : va) row.mean_a += v;
    for (double v : vb) row.mean_b += v;
    row.mean_a /= static_cast<double>(va.size());
    row.mean_b /= static_cast<double>(vb.size());
    try {
      const WelchResult w = welch_t_one_tailed(va, vb);
      row.t = w.t;
      row.df = w.df;
      row.p_value = w.p_value;
    } catch (const DataError&) {
      // zero variance on both sides: no evidence when means agree, full
      // separation otherwise
      row.df = static_cast<double>(va.size() - 1);
      if (row.mean_a == row.mean_b) {
        row.t = 0.0;
        row.p_value = 0.5;
      } else {
        row.t = row.mean_a > row.mean_b ? std::numeric_limits<double>::infinity()
                                        : -std::numeric_limits<double>::infinity();
        row.p_value = row.mean_a > row.mean_b ? 0.0 : 1.0;
      }
    }
    row.stars = significance_stars(row.p_value);
    cmp.welch.push_back(std::move(row));
  }
  if (positions != nullptr) {
    cmp.has_ks = true;
    cmp.ks = ks_two_sample(detail::pooled_top10_positions(algo_dir_a, a, *positions),
                           detail::pooled_top10_positions(algo_dir_b, b, *positions));
  }
  return cmp;
}

inline void write_comparison_tsv(std::ostream& os, const Comparison& cmp) {
  os << "metric\tmean_a\tmean_b\tt\tdf\tp_value\tsignificance\n";
  char buf[160];
  for (const auto& row : cmp.welch) {
    std::snprintf(buf, sizeof(buf), "%s\t%.6f\t%.6f\t%.6f\t%.6f\t%.6g\t%s",
                  row.metric.c_str(), row.mean_a, row.mean_b, row.t, row.df, row.p_value,
                  row.stars.c_str());
    os << buf << '\n';
  }
  if (cmp.has_ks) {
    std::snprintf(buf, sizeof(buf), "KS(top-10 positions)\tD=%.6f\tp=%.6g", cmp.ks.statistic,
                  cmp.ks.p_value);
    os << buf << '\n';
  }
}

}  // namespace rwe
