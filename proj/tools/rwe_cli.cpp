// Command-line surface for the random-walk-with-erasure recommender: data
// ingestion, train/test splitting, ideal-point fitting, recommendation,
// evaluation, grid search, run comparison and histogram export.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rwe/dataset.hpp"
#include "rwe/experiment.hpp"
#include "rwe/graph.hpp"
#include "rwe/ideology.hpp"
#include "rwe/metrics.hpp"
#include "rwe/parallel.hpp"
#include "rwe/recommend.hpp"
#include "rwe/split.hpp"

namespace fs = std::filesystem;

namespace {

struct DatasetArgs {
  std::string input;
  std::string format = "tsv-edges";
  int min_user_degree = 1;
  int min_item_degree = 1;
};

void add_dataset_flags(CLI::App* cmd, DatasetArgs& args) {
  cmd->add_option("--input", args.input, "interaction dataset file")->required();
  cmd->add_option("--format", args.format, "dataset format: movielens-dat or tsv-edges")
      ->check(CLI::IsMember({"movielens-dat", "tsv-edges"}));
  cmd->add_option("--min-user-degree", args.min_user_degree,
                  "drop users with fewer interactions (iterated to a fixed point)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--min-item-degree", args.min_item_degree,
                  "drop items with fewer interactions (iterated to a fixed point)")
      ->check(CLI::PositiveNumber);
}

rwe::FeedbackGraph load_graph(const DatasetArgs& args) {
  const auto records =
      rwe::parse_dataset(args.input, rwe::dataset_format_from_name(args.format));
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(records.size());
  for (const auto& r : records) pairs.emplace_back(r.user_id, r.item_id);
  return rwe::FeedbackGraph::build(pairs, args.min_user_degree, args.min_item_degree);
}

struct SplitArgs {
  double test_fraction = 0.3;
  int min_interactions = 4;
  int repetitions = 3;
};

void add_split_flags(CLI::App* cmd, SplitArgs& args) {
  cmd->add_option("--test-fraction", args.test_fraction,
                  "per-user fraction of items held out for testing")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd->add_option("--min-interactions", args.min_interactions,
                  "users below this degree keep all items in train")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--repetitions", args.repetitions, "number of independent splits")
      ->check(CLI::PositiveNumber);
}

const CLI::Validator OddCount(
    [](std::string& s) {
      int v = 0;
      try {
        v = std::stoi(s);
      } catch (const std::exception&) {
        return std::string("not a number");
      }
      return v >= 1 && v % 2 == 1 ? std::string{}
                                  : std::string("must be a positive odd count");
    },
    "ODD", "odd-count");

rwe::PositionTable load_positions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rwe::DataError("cannot open positions file: " + path);
  return rwe::PositionTable::read_tsv(in, fs::path(path).filename().string());
}

std::vector<std::tuple<std::string, std::string, long long>> load_weighted_edges(
    const std::string& path) {
  std::vector<std::tuple<std::string, std::string, long long>> out;
  for (const auto& r :
       rwe::parse_dataset(path, rwe::DatasetFormat::TsvEdges)) {
    out.emplace_back(r.user_id, r.item_id, r.weight);
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  if (!fs::path(path).parent_path().empty()) {
    fs::create_directories(fs::path(path).parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rwe::DataError("cannot write output file: " + path);
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Random-walk-with-erasure recommendation toolkit"};
  app.require_subcommand(1);

  // --- ingest ---------------------------------------------------------
  auto* ingest = app.add_subcommand("ingest", "parse a dataset, filter it, emit edges TSV");
  DatasetArgs ingest_data;
  std::string ingest_out;
  add_dataset_flags(ingest, ingest_data);
  ingest->add_option("--output", ingest_out, "edge list TSV to write")->required();
  ingest->callback([&] {
    const auto graph = load_graph(ingest_data);
    auto out = open_output(ingest_out);
    for (rwe::Index u = 0; u < graph.num_users(); ++u) {
      for (rwe::Index i : graph.items_of(u)) {
        out << graph.user_id(u) << '\t' << graph.item_id(i) << '\n';
      }
    }
    std::cout << "users\t" << graph.num_users() << "\nitems\t" << graph.num_items()
              << "\nedges\t" << graph.num_edges() << '\n';
  });

  // --- split ----------------------------------------------------------
  auto* split_cmd = app.add_subcommand("split", "write train/test splits to disk");
  DatasetArgs split_data;
  SplitArgs split_args;
  std::uint64_t split_seed = 0;
  std::string split_outdir;
  add_dataset_flags(split_cmd, split_data);
  add_split_flags(split_cmd, split_args);
  split_cmd->add_option("--seed", split_seed, "root seed");
  split_cmd->add_option("--outdir", split_outdir, "output directory")->required();
  split_cmd->callback([&] {
    const auto graph = load_graph(split_data);
    rwe::SplitSpec spec{split_args.test_fraction, split_args.min_interactions,
                        split_args.repetitions, split_seed};
    const auto splits = rwe::split(graph, spec);
    for (std::size_t s = 0; s < splits.size(); ++s) {
      const fs::path dir = fs::path(split_outdir) / ("split-" + std::to_string(s));
      fs::create_directories(dir);
      std::ofstream train(dir / "train.tsv", std::ios::binary);
      const auto& tg = splits[s].train;
      for (rwe::Index u = 0; u < tg.num_users(); ++u) {
        for (rwe::Index i : tg.items_of(u)) {
          train << tg.user_id(u) << '\t' << tg.item_id(i) << '\n';
        }
      }
      std::ofstream test(dir / "test.tsv", std::ios::binary);
      for (rwe::Index u = 0; u < graph.num_users(); ++u) {
        for (rwe::Index i : splits[s].test_items_by_user[u]) {
          test << graph.user_id(u) << '\t' << graph.item_id(i) << '\n';
        }
      }
      std::cout << "split-" << s << "\tfingerprint\t" << rwe::hex_u64(splits[s].fingerprint)
                << "\ttest_edges\t" << splits[s].num_test_edges << '\n';
    }
  });

  // --- fit-ideology ----------------------------------------------------
  auto* fit_cmd = app.add_subcommand(
      "fit-ideology", "fit ideal points from endorsement and content-share graphs");
  std::string fit_r, fit_s, fit_out, fit_weighting = "unit", fit_anchor;
  int fit_anchor_sign = 1;
  bool fit_elite_only = false;
  rwe::FitConfig fit_cfg;
  fit_cmd->add_option("--endorsements", fit_r, "user->elite edges TSV (with counts)")
      ->required();
  fit_cmd->add_option("--shares", fit_s, "user->content edges TSV (with counts)");
  fit_cmd->add_option("--output", fit_out, "positions TSV to write")->required();
  fit_cmd->add_option("--lambda", fit_cfg.lambda, "L2 strength on positions");
  fit_cmd->add_option("--mu", fit_cfg.mu, "elite-graph trade-off");
  fit_cmd->add_option("--learning-rate", fit_cfg.learning_rate, "initial ascent step");
  fit_cmd->add_option("--max-epochs", fit_cfg.max_epochs, "epoch cap")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--tolerance", fit_cfg.tolerance, "gradient-norm stop threshold");
  fit_cmd->add_option("--seed", fit_cfg.seed, "root seed");
  fit_cmd->add_option("--weighting", fit_weighting, "confidence weighting: unit or log-count")
      ->check(CLI::IsMember({"unit", "log-count"}));
  fit_cmd->add_flag("--elite-only", fit_elite_only, "ignore the content-share graph");
  fit_cmd->add_option("--anchor", fit_anchor, "entity id used to resolve the sign symmetry");
  fit_cmd->add_option("--anchor-sign", fit_anchor_sign, "desired sign of the anchor (+1/-1)")
      ->check(CLI::IsMember({1, -1}));
  fit_cmd->callback([&] {
    fit_cfg.weighting = fit_weighting == "unit" ? rwe::ConfidenceWeighting::Unit
                                                : rwe::ConfidenceWeighting::LogCount;
    const auto r = load_weighted_edges(fit_r);
    std::vector<std::tuple<std::string, std::string, long long>> s;
    if (!fit_s.empty()) s = load_weighted_edges(fit_s);
    const auto data = rwe::EndorsementData::from_records(r, s, fit_cfg.weighting);
    auto model = fit_elite_only ? rwe::elite_only_fit(data, fit_cfg)
                                : rwe::fit(data, fit_cfg);
    if (!fit_anchor.empty()) {
      const auto [kind, index] = data.find_entity(fit_anchor);
      model = rwe::align_sign(std::move(model), kind, index, fit_anchor_sign);
    }
    auto out = open_output(fit_out);
    rwe::write_positions_tsv(out, model,
                             fit_elite_only ? data.without_contents() : data);
    std::cout << "epochs\t" << model.epochs_run << "\nconverged\t"
              << (model.converged ? "yes" : "no") << "\nobjective\t"
              << rwe::format_score(model.objective_trace.back()) << "\ngrad_norm\t"
              << rwe::format_score(model.final_grad_norm) << '\n';
  });

  // --- recommend --------------------------------------------------------
  auto* rec_cmd = app.add_subcommand("recommend",
                                     "produce top-k recommendations on the full graph");
  DatasetArgs rec_data;
  std::string rec_algorithm = "p3", rec_positions, rec_out;
  double rec_beta = 0.7, rec_nu = 1.0, rec_epsilon = 0.9;
  int rec_neighbors = 50, rec_walk_k = 3, rec_iterations = 10, rec_topk = 10;
  add_dataset_flags(rec_cmd, rec_data);
  rec_cmd->add_option("--algorithm", rec_algorithm, "p3, rp3b, itemknn, rwe-d or rwe-b")
      ->check(CLI::IsMember({"p3", "rp3b", "itemknn", "rwe-d", "rwe-b"}));
  rec_cmd->add_option("--beta", rec_beta, "degree exponent (rp3b, rwe-d)");
  rec_cmd->add_option("--nu", rec_nu, "element-wise erasure exponent (rwe-d, rwe-b)");
  rec_cmd->add_option("--neighbors", rec_neighbors, "itemknn neighborhood size")
      ->check(CLI::PositiveNumber);
  rec_cmd->add_option("--epsilon", rec_epsilon, "non-bridge erasure constant (rwe-b)");
  rec_cmd->add_option("--walk-k", rec_walk_k, "odd walk length")->check(OddCount);
  rec_cmd->add_option("--iterations", rec_iterations, "erasure iterations")
      ->check(CLI::PositiveNumber);
  rec_cmd->add_option("--positions", rec_positions, "positions TSV (rwe-b)");
  rec_cmd->add_option("--topk", rec_topk, "list length")->check(CLI::PositiveNumber);
  rec_cmd->add_option("--output", rec_out, "ranked lists TSV")->required();
  rec_cmd->callback([&] {
    const auto graph = load_graph(rec_data);
    const rwe::TransitionMatrix P(graph);
    const auto algo = rwe::algorithm_from_name(rec_algorithm);
    std::optional<rwe::ItemSimilarityIndex> knn;
    std::optional<rwe::ErasureMatrix> erasure;
    if (algo == rwe::Algorithm::ItemKnn) {
      knn.emplace(graph, rec_neighbors);
    } else if (algo == rwe::Algorithm::RweD) {
      erasure = rwe::erasure_longtail(graph, rec_beta).with_nu(rec_nu);
    } else if (algo == rwe::Algorithm::RweB) {
      if (rec_positions.empty()) throw rwe::DataError("rwe-b requires --positions");
      const auto table = load_positions(rec_positions);
      const auto pos = rwe::resolve_positions(graph, table);
      for (rwe::Index u = 0; u < graph.num_users(); ++u) {
        if (std::isnan(pos.users[u])) {
          throw rwe::DataError("rwe-b: no position for user '" + graph.user_id(u) + "'");
        }
      }
      for (rwe::Index i = 0; i < graph.num_items(); ++i) {
        if (std::isnan(pos.items[i])) {
          throw rwe::DataError("rwe-b: no position for item '" + graph.item_id(i) + "'");
        }
      }
      erasure = rwe::erasure_bridge(pos.users, pos.items, rec_epsilon, rec_nu);
    }
    std::vector<rwe::RankedList> lists(graph.num_users());
    rwe::parallel_chunks(graph.num_users(), [&](std::size_t, std::size_t begin,
                                                std::size_t end) {
      for (std::size_t uu = begin; uu < end; ++uu) {
        const rwe::Index u = static_cast<rwe::Index>(uu);
        rwe::ScoreMap scores;
        switch (algo) {
          case rwe::Algorithm::P3: scores = rwe::p3_score(P, u); break;
          case rwe::Algorithm::Rp3b: scores = rwe::rp3b_score(P, graph, u, rec_beta); break;
          case rwe::Algorithm::ItemKnn: scores = rwe::itemknn_score(*knn, graph, u); break;
          default:
            scores = rwe::rwe_score(P, *erasure, u, rec_walk_k, rec_iterations).scores;
        }
        const auto items = graph.items_of(u);
        lists[uu] = rwe::recommend_topk(scores, {items.begin(), items.end()}, u, rec_topk);
      }
    });
    auto out = open_output(rec_out);
    rwe::write_ranked_tsv(out, graph, lists);
    std::cout << "users\t" << graph.num_users() << "\nlists\t" << lists.size() << '\n';
  });

  // --- evaluate ---------------------------------------------------------
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "evaluate externally produced ranked lists against regenerated splits");
  DatasetArgs eval_data;
  SplitArgs eval_split;
  std::uint64_t eval_seed = 0;
  std::vector<std::string> eval_ranked;
  std::string eval_positions, eval_json, eval_tsv, eval_name = "external";
  add_dataset_flags(eval_cmd, eval_data);
  add_split_flags(eval_cmd, eval_split);
  eval_cmd->add_option("--seed", eval_seed, "root seed the splits were generated with");
  eval_cmd->add_option("--ranked", eval_ranked,
                       "one ranked-lists TSV per split, in split order")
      ->required()
      ->expected(-1);
  eval_cmd->add_option("--positions", eval_positions, "positions TSV for ideological metrics");
  eval_cmd->add_option("--name", eval_name, "algorithm label for the report");
  eval_cmd->add_option("--output", eval_json, "report JSON path");
  eval_cmd->add_option("--tsv", eval_tsv, "human-readable report table path");
  eval_cmd->callback([&] {
    const auto graph = load_graph(eval_data);
    rwe::SplitSpec spec{eval_split.test_fraction, eval_split.min_interactions,
                        eval_split.repetitions, eval_seed};
    const auto splits = rwe::split(graph, spec);
    if (eval_ranked.size() != splits.size()) {
      throw rwe::DataError("expected " + std::to_string(splits.size()) +
                           " ranked files (one per split), got " +
                           std::to_string(eval_ranked.size()));
    }
    std::optional<rwe::GraphPositions> positions;
    if (!eval_positions.empty()) {
      positions = rwe::resolve_positions(graph, load_positions(eval_positions));
    }
    rwe::EvalReport report;
    report.algorithm = eval_name;
    report.gridpoint = "external";
    report.seed = eval_seed;
    for (std::size_t s = 0; s < splits.size(); ++s) {
      std::ifstream in(eval_ranked[s]);
      if (!in) throw rwe::DataError("cannot open ranked lists: " + eval_ranked[s]);
      const auto lists = rwe::read_ranked_tsv(in, graph, eval_ranked[s]);
      report.split_fingerprints.push_back(splits[s].fingerprint);
      report.per_split.push_back(
          rwe::evaluate_external_lists(lists, splits[s], positions ? &*positions : nullptr));
    }
    report.compute_averages();
    if (!eval_json.empty()) {
      auto out = open_output(eval_json);
      out << report.to_json().dump(2) << '\n';
    }
    if (!eval_tsv.empty()) {
      auto out = open_output(eval_tsv);
      report.write_tsv(out);
    }
    report.write_tsv(std::cout);
  });

  // --- grid --------------------------------------------------------------
  auto* grid_cmd = app.add_subcommand(
      "grid", "grid-search experiment: split, score, evaluate, select best by mean AUC");
  DatasetArgs grid_data;
  SplitArgs grid_split;
  rwe::ExperimentConfig grid_cfg;
  std::string grid_algorithm = "p3", grid_positions, grid_outdir;
  add_dataset_flags(grid_cmd, grid_data);
  add_split_flags(grid_cmd, grid_split);
  grid_cmd->add_option("--algorithm", grid_algorithm, "p3, rp3b, itemknn, rwe-d or rwe-b")
      ->check(CLI::IsMember({"p3", "rp3b", "itemknn", "rwe-d", "rwe-b"}));
  grid_cmd->add_option("--beta", grid_cfg.beta_grid, "beta grid (rp3b, rwe-d)");
  grid_cmd->add_option("--nu", grid_cfg.nu_grid, "nu grid (rwe-d, rwe-b)");
  grid_cmd->add_option("--neighbors", grid_cfg.neighbors_grid, "neighborhood grid (itemknn)");
  grid_cmd->add_option("--epsilon", grid_cfg.epsilon, "non-bridge erasure constant (rwe-b)");
  grid_cmd->add_option("--walk-k", grid_cfg.walk_k, "odd walk length")->check(OddCount);
  grid_cmd->add_option("--iterations", grid_cfg.iterations, "erasure iterations")
      ->check(CLI::PositiveNumber);
  grid_cmd->add_option("--positions", grid_positions, "positions TSV");
  grid_cmd->add_option("--outdir", grid_outdir, "artifact directory")->required();
  grid_cmd->add_option("--seed", grid_cfg.seed, "root seed");
  grid_cmd->add_option("--list-length", grid_cfg.list_length,
                       "persisted ranked-list length (>= 20)")
      ->check(CLI::Range(20, 1 << 20));
  grid_cmd->callback([&] {
    grid_cfg.dataset = grid_data.input;
    grid_cfg.format = rwe::dataset_format_from_name(grid_data.format);
    grid_cfg.min_user_degree = grid_data.min_user_degree;
    grid_cfg.min_item_degree = grid_data.min_item_degree;
    grid_cfg.algorithm = rwe::algorithm_from_name(grid_algorithm);
    grid_cfg.split_spec = rwe::SplitSpec{grid_split.test_fraction,
                                         grid_split.min_interactions,
                                         grid_split.repetitions, grid_cfg.seed};
    grid_cfg.positions = grid_positions;
    grid_cfg.outdir = grid_outdir;
    const auto result = rwe::run_experiment(grid_cfg);
    std::cout << "best gridpoint\t" << result.best.gridpoint << '\n';
    result.best.write_tsv(std::cout);
  });

  // --- compare -------------------------------------------------------------
  auto* cmp_cmd = app.add_subcommand("compare",
                                     "significance tests between two grid runs");
  std::string cmp_a, cmp_b, cmp_positions, cmp_out;
  std::vector<std::string> cmp_metrics{"RecRange@10"};
  cmp_cmd->add_option("--run-a", cmp_a, "algorithm directory of run A")->required();
  cmp_cmd->add_option("--run-b", cmp_b, "algorithm directory of run B")->required();
  cmp_cmd->add_option("--metric", cmp_metrics, "metrics to test (default RecRange@10)");
  cmp_cmd->add_option("--positions", cmp_positions, "positions TSV for the KS test");
  cmp_cmd->add_option("--output", cmp_out, "significance table TSV path");
  cmp_cmd->callback([&] {
    std::optional<rwe::PositionTable> table;
    if (!cmp_positions.empty()) table = load_positions(cmp_positions);
    const auto cmp = rwe::compare_runs(cmp_a, cmp_b, cmp_metrics,
                                       table ? &*table : nullptr);
    if (!cmp_out.empty()) {
      auto out = open_output(cmp_out);
      rwe::write_comparison_tsv(out, cmp);
    }
    rwe::write_comparison_tsv(std::cout, cmp);
  });

  // --- export-hist -----------------------------------------------------------
  auto* hist_cmd = app.add_subcommand(
      "export-hist", "binned ideological-position counts of top-k recommendations");
  std::vector<std::string> hist_ranked;
  std::string hist_positions, hist_out;
  int hist_bins = 20, hist_topk = 10;
  hist_cmd->add_option("--ranked", hist_ranked, "ranked-lists TSV files")
      ->required()
      ->expected(-1);
  hist_cmd->add_option("--positions", hist_positions, "positions TSV")->required();
  hist_cmd->add_option("--bins", hist_bins, "bin count")->check(CLI::Range(2, 10000));
  hist_cmd->add_option("--topk", hist_topk, "list prefix to histogram")
      ->check(CLI::PositiveNumber);
  hist_cmd->add_option("--output", hist_out, "bin table TSV path")->required();
  hist_cmd->callback([&] {
    const auto table = load_positions(hist_positions);
    std::vector<double> values;
    std::vector<rwe::Leaning> classes;
    for (const auto& file : hist_ranked) {
      for (const auto& row : rwe::read_ranked_rows(file)) {
        if (row.rank > hist_topk) continue;
        const double theta = table.user_position(row.user_id);
        if (std::isnan(theta)) {
          throw rwe::DataError("export-hist: no position for user '" + row.user_id + "'");
        }
        const double pos = table.item_position(row.item_id);
        if (std::isnan(pos)) {
          throw rwe::DataError("export-hist: no position for item '" + row.item_id + "'");
        }
        values.push_back(pos);
        classes.push_back(rwe::classify(theta));
      }
    }
    const auto histogram = rwe::histogram_export(values, classes, hist_bins);
    auto out = open_output(hist_out);
    histogram.write_tsv(out);
    std::cout << "values\t" << values.size() << "\nbins\t" << hist_bins << '\n';
  });

  // flat key=value lines, keys spelled <subcommand>.<flag>, e.g. grid.input=...
  app.set_config("--config", "",
                 "flat key=value config file; keys are <subcommand>.<flag>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or requested help
    return code == 0 ? 0 : 1;     // usage errors exit 1
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const rwe::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
