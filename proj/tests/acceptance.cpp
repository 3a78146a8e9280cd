// Acceptance suite. Three sections, selected by argv[1]:
//
//   substitutes  - oracle equivalences, gradient checks, synthetic ideology
//                  recovery, the bridging diversification direction, and the
//                  brute-force metric cross-check
//   determinism  - two identical CLI grid runs must produce byte-identical
//                  MANIFESTs (binary path from $RWE_CLI)
//   ml1m         - MovieLens-1M reproduction; needs the public ratings.dat
//                  (path from $RWE_ML1M or data/ml-1m/ratings.dat). Exits 77
//                  when the dataset is not available.
//
// Each criterion prints one PASS/FAIL line. Absolute-value targets whose
// metric definitions are convention-dependent (hit rate, Gini, surprisal,
// personalization) are marked [soft] and do not fail the run; orderings and
// oracle checks are hard gates.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "rwe/experiment.hpp"
#include "rwe/ideology.hpp"
#include "rwe/metrics.hpp"
#include "rwe/recommend.hpp"
#include "rwe/split.hpp"
#include "rwe/stats.hpp"
#include "rwe/walk.hpp"

namespace fs = std::filesystem;
using rwe::EndorsementData;
using rwe::ErasureMatrix;
using rwe::FeedbackGraph;
using rwe::Index;

namespace {

int hard_failures = 0;
int soft_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail,
            bool hard = true) {
  if (!pass) {
    if (hard) ++hard_failures;
    else ++soft_failures;
  }
  std::printf("[%s]%s %s: %s\n", pass ? "PASS" : "FAIL", (!pass && !hard) ? " [soft]" : "",
              name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fmt_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

rwe::FeedbackGraph random_graph(rwe::Rng& rng, int max_users, int max_items,
                                double density) {
  const int users = 2 + static_cast<int>(rng.below(max_users - 1));
  const int items = 2 + static_cast<int>(rng.below(max_items - 1));
  std::vector<std::pair<std::string, std::string>> edges;
  for (int u = 0; u < users; ++u) {
    edges.emplace_back("u" + std::to_string(u),
                       "i" + std::to_string(rng.below(items)));
    for (int i = 0; i < items; ++i) {
      if (rng.uniform01() < density) {
        edges.emplace_back("u" + std::to_string(u), "i" + std::to_string(i));
      }
    }
  }
  return FeedbackGraph::build(edges, 1, 1);
}

std::vector<double> normalized(const rwe::RweScores& s) {
  double total = 0.0;
  for (const auto& [item, v] : s.scores) total += v;
  std::vector<double> out;
  out.reserve(s.scores.size());
  for (const auto& [item, v] : s.scores) out.push_back(v / total);
  return out;
}

std::vector<Index> ranking_of(const std::vector<std::pair<Index, double>>& scores) {
  std::vector<std::pair<double, Index>> tmp;
  tmp.reserve(scores.size());
  for (const auto& [item, v] : scores) tmp.emplace_back(-v, item);
  std::sort(tmp.begin(), tmp.end());
  std::vector<Index> out;
  out.reserve(tmp.size());
  for (const auto& [nv, item] : tmp) out.push_back(item);
  return out;
}

// ---------------------------------------------------------------- substitutes

void check_closed_form_oracle() {
  rwe::Rng rng(rwe::derive_seed(2024, "acceptance-oracle"));
  double worst = 0.0;
  int graphs = 0;
  while (graphs < 200) {
    const auto g = random_graph(rng, 30, 30, 0.2);
    if (g.num_users() + g.num_items() > 60) continue;
    ++graphs;
    const auto P = rwe::transition(g);
    std::vector<double> upos(g.num_users()), ipos(g.num_items());
    for (double& p : upos) p = rng.normal();
    for (double& p : ipos) p = rng.normal();
    const auto q = rwe::erasure_bridge(upos, ipos, 0.9, 0.5 + rng.uniform01() * 2.0);
    const int k = rng.below(2) == 0 ? 3 : 5;
    const Index u = static_cast<Index>(rng.below(g.num_users()));
    const auto iter = normalized(rwe::rwe_score(P, q, u, k, 50));
    const auto closed = normalized(rwe::rwe_closed_form(P, q, u, k));
    for (std::size_t e = 0; e < iter.size(); ++e) {
      worst = std::max(worst, std::abs(iter[e] - closed[e]));
    }
  }
  report("rwe iterative matches closed form (200 graphs, k in {3,5})", worst < 1e-10,
         "max normalized deviation " + fmt_sci(worst) + " (tolerance 1e-10)");
}

void check_p3_degeneration() {
  rwe::Rng rng(rwe::derive_seed(2025, "acceptance-degenerate"));
  bool ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_graph(rng, 14, 12, 0.3);
    const auto P = rwe::transition(g);
    for (Index u = 0; u < g.num_users() && ok; ++u) {
      const auto rwe_rank =
          ranking_of(rwe::rwe_score(P, ErasureMatrix::zero(), u, 3, 10).scores);
      const auto p3_rank = ranking_of(rwe::p3_score(P, u));
      ok = rwe_rank == p3_rank;
    }
    if (!ok) break;
  }
  report("zero erasure reproduces the p3 ranking (50 graphs, all users)", ok,
         ok ? "rankings identical" : "ranking mismatch found");
}

/// Preference-relation equality of two score maps over the same support.
/// Score gaps inside a 1e-9 relative band count as ties: the two routes
/// compute the same real values through different roundings, so the last
/// bit can jitter. Any disagreement beyond the band is a real mismatch.
bool rankings_equivalent(const std::vector<std::pair<Index, double>>& a,
                         const std::vector<std::pair<Index, double>>& b,
                         double rel = 1e-9) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].first != b[k].first) return false;  // both ascend by item
  }
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = x + 1; y < a.size(); ++y) {
      const double da = a[x].second - a[y].second;
      const double db = b[x].second - b[y].second;
      const bool tie_a = std::abs(da) <= rel * std::max(a[x].second, a[y].second);
      const bool tie_b = std::abs(db) <= rel * std::max(b[x].second, b[y].second);
      if (!tie_a && !tie_b && (da > 0) != (db > 0)) return false;
    }
  }
  return true;
}

void check_rp3b_equivalence() {
  rwe::Rng rng(rwe::derive_seed(2026, "acceptance-rp3b"));
  bool ok = true;
  for (int trial = 0; trial < 50 && ok; ++trial) {
    const auto g = random_graph(rng, 14, 12, 0.3);
    const auto P = rwe::transition(g);
    const double beta = rng.uniform01() * 2.0;
    const auto q = rwe::erasure_longtail(g, beta);  // nu = 1
    for (Index u = 0; u < g.num_users() && ok; ++u) {
      ok = rankings_equivalent(rwe::rwe_score(P, q, u, 3, 50).scores,
                               rwe::rp3b_score(P, g, u, beta));
    }
  }
  report("rwe-d at nu=1 ranks like rp3b (50 graphs, matched beta)", ok,
         ok ? "rankings identical" : "ranking mismatch found");
}

void check_gradients() {
  rwe::Rng rng(rwe::derive_seed(2027, "acceptance-gradients"));
  const double h = 1e-5;
  double worst = 0.0;
  int points = 0;
  while (points < 100) {
    // fresh random data every few points, fresh parameter point every time
    std::vector<std::tuple<std::string, std::string, long long>> r, s;
    const int users = 4 + static_cast<int>(rng.below(4));
    const int elites = 3 + static_cast<int>(rng.below(3));
    const int contents = 2 + static_cast<int>(rng.below(3));
    for (int u = 0; u < users; ++u) {
      for (int e = 0; e < elites; ++e) {
        if (rng.uniform01() < 0.4 || e == u % elites || u == e % users) {
          r.emplace_back("u" + std::to_string(u), "e" + std::to_string(e),
                         1 + static_cast<long long>(rng.below(4)));
        }
      }
      for (int c = 0; c < contents; ++c) {
        if (rng.uniform01() < 0.4 || c == u % contents || u == c % users) {
          s.emplace_back("u" + std::to_string(u), "c" + std::to_string(c),
                         1 + static_cast<long long>(rng.below(4)));
        }
      }
    }
    const auto data = EndorsementData::from_records(
        r, s,
        points % 2 == 0 ? rwe::ConfidenceWeighting::Unit
                        : rwe::ConfidenceWeighting::LogCount);
    rwe::IdealPointModel m;
    m.lambda = rng.uniform01();
    m.mu = 0.5 + rng.uniform01() * 2.0;
    m.theta.resize(users);
    m.phi.resize(elites);
    m.psi.resize(contents);
    m.alpha.resize(users);
    m.beta_e.resize(elites);
    m.gamma.resize(contents);
    for (auto* v : {&m.theta, &m.phi, &m.psi, &m.alpha, &m.beta_e, &m.gamma}) {
      for (double& x : *v) x = rng.normal();
    }
    const auto g = rwe::gradients(m, data);
    auto fd_block = [&](std::vector<double>& params, const std::vector<double>& grad) {
      for (std::size_t p = 0; p < params.size(); ++p) {
        const double saved = params[p];
        params[p] = saved + h;
        const double up = rwe::log_likelihood(m, data);
        params[p] = saved - h;
        const double down = rwe::log_likelihood(m, data);
        params[p] = saved;
        const double fd = (up - down) / (2.0 * h);
        worst = std::max(worst, std::abs(grad[p] - fd) /
                                    std::max({1.0, std::abs(grad[p]), std::abs(fd)}));
      }
    };
    fd_block(m.theta, g.theta);
    fd_block(m.phi, g.phi);
    fd_block(m.psi, g.psi);
    fd_block(m.alpha, g.alpha);
    fd_block(m.beta_e, g.beta_e);
    fd_block(m.gamma, g.gamma);
    ++points;
  }
  report("analytic gradients vs central differences (100 random points)", worst < 1e-5,
         "max relative error " + fmt_sci(worst) + " (tolerance 1e-5)");
}

void check_ideology_recovery() {
  rwe::Rng rng(rwe::derive_seed(2028, "acceptance-recovery"));
  const int users = 200, elites = 30, contents = 30;
  std::vector<double> true_theta(users), true_phi(elites), true_psi(contents);
  for (double& x : true_theta) x = rng.normal();
  for (double& x : true_phi) x = rng.normal();
  for (double& x : true_psi) x = rng.normal();
  std::vector<std::tuple<std::string, std::string, long long>> r, s;
  for (int u = 0; u < users; ++u) {
    for (int e = 0; e < elites; ++e) {
      if (rng.uniform01() <
          rwe::sigmoid(rwe::linear_predictor(true_theta[u], true_phi[e], 0, 0))) {
        r.emplace_back("u" + std::to_string(u), "e" + std::to_string(e), 1);
      }
    }
    for (int c = 0; c < contents; ++c) {
      if (rng.uniform01() <
          rwe::sigmoid(rwe::linear_predictor(true_theta[u], true_psi[c], 0, 0))) {
        s.emplace_back("u" + std::to_string(u), "c" + std::to_string(c), 1);
      }
    }
  }

  auto theta_correlation = [&](const EndorsementData& data,
                               const rwe::IdealPointModel& model) {
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < data.user_ids().size(); ++k) {
      xs.push_back(model.theta[k]);
      ys.push_back(true_theta[std::stoul(data.user_ids()[k].substr(1))]);
    }
    return rwe::pearson(xs, ys);
  };

  const auto data = EndorsementData::from_records(r, s);
  rwe::FitConfig cfg;
  cfg.seed = 99;
  cfg.max_epochs = 300;
  const auto model = rwe::fit(data, cfg);
  const double r_theta = theta_correlation(data, model);
  report("synthetic ideology recovery |pearson| > 0.9",
         std::abs(r_theta) > 0.9, "theta correlation " + fmt(std::abs(r_theta)));

  // delete half of R (keeping every user and elite covered), then compare the
  // joint fit against the elite-only fit on theta recovery
  std::vector<std::tuple<std::string, std::string, long long>> r_half;
  std::set<std::string> users_seen, elites_seen;
  rwe::Rng del(rwe::derive_seed(2029, "acceptance-deletion"));
  for (const auto& row : r) {
    const bool keep_for_cover = users_seen.insert(std::get<0>(row)).second ||
                                elites_seen.insert(std::get<1>(row)).second;
    if (keep_for_cover || del.uniform01() >= 0.5) r_half.push_back(row);
  }
  const auto joint_data = EndorsementData::from_records(r_half, s);
  const auto elite_data = EndorsementData::from_records(r_half, {});
  const auto joint = rwe::fit(joint_data, cfg);
  const auto elite = rwe::elite_only_fit(elite_data, cfg);
  const double r_joint = std::abs(theta_correlation(joint_data, joint));
  const double r_elite = std::abs(theta_correlation(elite_data, elite));
  report("joint fit recovers theta at least as well as elite-only (50% of R deleted)",
         r_joint >= r_elite,
         "joint " + fmt(r_joint) + " vs elite-only " + fmt(r_elite));
}

/// Two user/item clusters at positions -1 and +1 plus a thin bridge band
/// around 0; interactions mostly stay on the user's own side.
void write_polarized_dataset(const fs::path& edges_file, const fs::path& positions_file,
                             std::uint64_t seed) {
  rwe::Rng rng(rwe::derive_seed(seed, "acceptance-polarized"));
  std::ofstream edges(edges_file);
  std::ofstream positions(positions_file);
  const int per_side = 70, bridge_users = 12;
  const int items_per_side = 24, bridge_items = 12;
  std::vector<double> item_pos;
  for (int i = 0; i < 2 * items_per_side + bridge_items; ++i) {
    double pos;
    if (i < items_per_side) pos = -1.0 + 0.2 * rng.normal();
    else if (i < 2 * items_per_side) pos = 1.0 + 0.2 * rng.normal();
    else pos = 0.12 * rng.normal();
    item_pos.push_back(pos);
    positions << "content\titem" << i << '\t' << rwe::format_score(pos) << "\t0\n";
  }
  auto pick_item = [&](double own_sign) {
    const double roll = rng.uniform01();
    if (roll < 0.78) {  // own cluster
      return own_sign < 0 ? static_cast<int>(rng.below(items_per_side))
                          : items_per_side + static_cast<int>(rng.below(items_per_side));
    }
    if (roll < 0.95) {  // bridge band
      return 2 * items_per_side + static_cast<int>(rng.below(bridge_items));
    }
    // rare crossing
    return own_sign < 0 ? items_per_side + static_cast<int>(rng.below(items_per_side))
                        : static_cast<int>(rng.below(items_per_side));
  };
  int uid = 0;
  auto emit_user = [&](double pos) {
    positions << "user\tu" << uid << '\t' << rwe::format_score(pos) << "\t0\n";
    std::set<int> items;
    while (items.size() < 12) items.insert(pick_item(pos));
    for (int i : items) edges << 'u' << uid << "\titem" << i << "\n";
    ++uid;
  };
  for (int k = 0; k < per_side; ++k) emit_user(-1.0 + 0.15 * rng.normal());
  for (int k = 0; k < per_side; ++k) emit_user(1.0 + 0.15 * rng.normal());
  for (int k = 0; k < bridge_users; ++k) emit_user(0.1 * rng.normal());
}

void check_bridging_direction() {
  const fs::path tmp =
      fs::temp_directory_path() / ("rwe_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  const auto edges = tmp / "polarized.tsv";
  const auto positions = tmp / "positions.tsv";
  write_polarized_dataset(edges, positions, 31337);

  rwe::ExperimentConfig cfg;
  cfg.dataset = edges;
  cfg.format = rwe::DatasetFormat::TsvEdges;
  cfg.outdir = tmp / "runs";
  cfg.seed = 4242;
  cfg.split_spec = rwe::SplitSpec{0.3, 4, 3, 4242};
  cfg.positions = positions;
  cfg.list_length = 20;

  cfg.algorithm = rwe::Algorithm::P3;
  const auto p3 = rwe::run_experiment(cfg);
  cfg.algorithm = rwe::Algorithm::Rp3b;
  cfg.beta_grid = {0.5};
  const auto rp3b = rwe::run_experiment(cfg);
  cfg.algorithm = rwe::Algorithm::RweB;
  cfg.nu_grid = {1.0};
  cfg.epsilon = 0.9;
  const auto rweb = rwe::run_experiment(cfg);

  const auto rb = rweb.best.split_values("RecRange@10");
  const auto pp = p3.best.split_values("RecRange@10");
  const auto rr = rp3b.best.split_values("RecRange@10");
  const auto w_p3 = rwe::welch_t_one_tailed(rb, pp);
  const auto w_rp3 = rwe::welch_t_one_tailed(rb, rr);
  const double mean_rb = rweb.best.averaged.at("RecRange@10");
  const double mean_p3 = p3.best.averaged.at("RecRange@10");
  const double mean_rr = rp3b.best.averaged.at("RecRange@10");
  report("rwe-b widens RecRange@10 over p3 (welch one-tailed p < 0.05)",
         mean_rb > mean_p3 && w_p3.p_value < 0.05,
         fmt(mean_rb) + " vs " + fmt(mean_p3) + ", p " + fmt_sci(w_p3.p_value));
  report("rwe-b widens RecRange@10 over rp3b (welch one-tailed p < 0.05)",
         mean_rb > mean_rr && w_rp3.p_value < 0.05,
         fmt(mean_rb) + " vs " + fmt(mean_rr) + ", p " + fmt_sci(w_rp3.p_value));
  fs::remove_all(tmp);
}

void check_metric_brute_force() {
  // compact cross-check on <= 5-user instances; the unit suite runs the full
  // battery of oracles
  rwe::Rng rng(rwe::derive_seed(2030, "acceptance-metrics"));
  bool ok = true;
  for (int trial = 0; trial < 10 && ok; ++trial) {
    std::vector<std::pair<std::string, std::string>> edges;
    const int users = 2 + static_cast<int>(rng.below(4));
    for (int u = 0; u < users; ++u) {
      for (int i = 0; i < 10; ++i) {
        if (rng.uniform01() < 0.35 || i == u) {
          edges.emplace_back("u" + std::to_string(u), "i" + std::to_string(i));
        }
      }
    }
    for (int i = 0; i < 10; ++i) edges.emplace_back("filler", "i" + std::to_string(i));
    const auto g = FeedbackGraph::build(edges, 1, 1);
    const auto P = rwe::transition(g);
    rwe::AccuracyAccumulator acc(10);
    double expected_auc_sum = 0.0;
    long auc_users = 0;
    for (Index u = 0; u < g.num_users(); ++u) {
      const auto items = g.items_of(u);
      const std::vector<Index> train(items.begin(), items.end());
      const auto full = rwe::rank_all_candidates(rwe::p3_score(P, u), g.num_items(),
                                                 train, u);
      std::vector<Index> test;
      for (const auto& [item, score] : full.entries) {
        if (rng.uniform01() < 0.3) test.push_back(item);
      }
      std::sort(test.begin(), test.end());
      acc.add_user(full, test);
      // direct pair counting
      const std::set<Index> tset(test.begin(), test.end());
      double correct = 0.0;
      long pairs = 0;
      for (const auto& [pi, ps] : full.entries) {
        if (!tset.count(pi)) continue;
        for (const auto& [ni, ns] : full.entries) {
          if (tset.count(ni)) continue;
          ++pairs;
          correct += ps > ns ? 1.0 : (ps == ns ? 0.5 : 0.0);
        }
      }
      if (pairs > 0 && !test.empty()) {
        expected_auc_sum += correct / pairs;
        ++auc_users;
      }
    }
    if (auc_users == 0) continue;
    ok = std::abs(acc.finalize().auc - expected_auc_sum / auc_users) == 0.0;
  }
  report("accuracy metrics equal brute-force recomputation on <= 5-user instances", ok,
         ok ? "exact match" : "mismatch");
}

int run_substitutes() {
  check_closed_form_oracle();
  check_p3_degeneration();
  check_rp3b_equivalence();
  check_gradients();
  check_ideology_recovery();
  check_bridging_direction();
  check_metric_brute_force();
  return 0;
}

// --------------------------------------------------------------- determinism

int run_determinism() {
  const char* cli = std::getenv("RWE_CLI");
  if (cli == nullptr) {
    std::fprintf(stderr, "RWE_CLI must point at the built CLI binary\n");
    return 1;
  }
  const fs::path tmp =
      fs::temp_directory_path() / ("rwe_determinism_" + std::to_string(::getpid()));
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  {
    rwe::Rng rng(rwe::derive_seed(515, "determinism-data"));
    std::ofstream data(tmp / "edges.tsv");
    for (int u = 0; u < 40; ++u) {
      std::set<int> items;
      while (items.size() < 6) items.insert(static_cast<int>(rng.below(25)));
      for (int i : items) data << 'u' << u << "\titem" << i << "\n";
    }
  }
  auto grid = [&](const std::string& outdir) {
    const std::string cmd = std::string(cli) + " grid --input " +
                            (tmp / "edges.tsv").string() +
                            " --algorithm rwe-d --beta 0.4 0.8 --nu 0.7 --seed 99 " +
                            "--outdir " + outdir + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const int rc1 = grid((tmp / "run1").string());
  const int rc2 = grid((tmp / "run2").string());
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  const std::string m1 = slurp(tmp / "run1" / "MANIFEST");
  const std::string m2 = slurp(tmp / "run2" / "MANIFEST");
  const bool ok = rc1 == 0 && rc2 == 0 && !m1.empty() && m1 == m2;
  report("two identical grid runs produce byte-identical MANIFESTs", ok,
         ok ? "hash " + rwe::hex_u64(rwe::fnv1a64(m1)) : "manifests differ or run failed");
  fs::remove_all(tmp);
  return hard_failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------- ml1m

struct Ml1mTargets {
  const char* name;
  double value, target, tolerance;
  bool hard;
};

int run_ml1m() {
  fs::path ratings = "data/ml-1m/ratings.dat";
  if (const char* env = std::getenv("RWE_ML1M")) ratings = env;
  if (!fs::exists(ratings)) {
    std::printf(
        "[SKIP] ml-1m reproduction: dataset not found at %s\n"
        "       Download ml-1m.zip from the GroupLens site and point RWE_ML1M at\n"
        "       ratings.dat (or unpack to data/ml-1m/).\n",
        ratings.string().c_str());
    return 77;
  }

  const fs::path outdir =
      fs::temp_directory_path() / ("rwe_ml1m_" + std::to_string(::getpid()));
  fs::remove_all(outdir);

  rwe::ExperimentConfig cfg;
  cfg.dataset = ratings;
  cfg.format = rwe::DatasetFormat::MovielensDat;
  cfg.outdir = outdir;
  cfg.seed = 20;
  cfg.split_spec = rwe::SplitSpec{0.3, 4, 3, 20};
  cfg.list_length = 20;

  auto run = [&](rwe::Algorithm algo, std::vector<double> beta, std::vector<double> nu,
                 std::vector<int> neighbors) {
    cfg.algorithm = algo;
    cfg.beta_grid = std::move(beta);
    cfg.nu_grid = std::move(nu);
    cfg.neighbors_grid = std::move(neighbors);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = rwe::run_experiment(cfg);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    std::printf("       %s finished in %llds\n", rwe::algorithm_name(algo),
                static_cast<long long>(secs));
    std::fflush(stdout);
    return result.best;
  };

  const auto p3 = run(rwe::Algorithm::P3, {}, {}, {});
  const auto rp3b = run(rwe::Algorithm::Rp3b, {0.7}, {}, {});
  const auto rwed = run(rwe::Algorithm::RweD, {0.7}, {0.7}, {});
  const auto cf = run(rwe::Algorithm::ItemKnn, {}, {}, {400});

  const Ml1mTargets targets[] = {
      {"p3 AUC", p3.averaged.at("AUC"), 0.89, 0.02, true},
      {"p3 HR@10", p3.averaged.at("HR@10"), 0.09, 0.02, false},
      {"rp3b(0.7) AUC", rp3b.averaged.at("AUC"), 0.92, 0.02, true},
      {"rp3b(0.7) HR@10", rp3b.averaged.at("HR@10"), 0.13, 0.02, false},
      {"rp3b(0.7) GiniD@20", rp3b.averaged.at("GiniD@20"), 0.14, 0.05, false},
      {"rp3b(0.7) Surp@20", rp3b.averaged.at("Surp@20"), 2.95, 0.4, false},
      {"rwe-d(0.7,0.7) AUC", rwed.averaged.at("AUC"), 0.92, 0.02, true},
      {"rwe-d(0.7,0.7) HR@10", rwed.averaged.at("HR@10"), 0.12, 0.02, false},
      {"rwe-d(0.7,0.7) GiniD@20", rwed.averaged.at("GiniD@20"), 0.08, 0.05, false},
      {"rwe-d(0.7,0.7) Pers@20", rwed.averaged.at("Pers@20"), 0.70, 0.10, false},
  };
  for (const auto& t : targets) {
    report("ml-1m " + std::string(t.name) + " = " + fmt(t.target) + " +/- " +
               fmt(t.tolerance),
           std::abs(t.value - t.target) <= t.tolerance, "measured " + fmt(t.value),
           t.hard);
  }

  report("ml-1m ordering: AUC(rwe-d) >= AUC(p3) - 0.005",
         rwed.averaged.at("AUC") >= p3.averaged.at("AUC") - 0.005,
         fmt(rwed.averaged.at("AUC")) + " vs " + fmt(p3.averaged.at("AUC")));
  report("ml-1m ordering: GiniD(rp3b) > GiniD(p3)",
         rp3b.averaged.at("GiniD@20") > p3.averaged.at("GiniD@20"),
         fmt(rp3b.averaged.at("GiniD@20")) + " vs " + fmt(p3.averaged.at("GiniD@20")));
  report("ml-1m ordering: Surp(itemknn) > Surp(rp3b) > Surp(p3)",
         cf.averaged.at("Surp@20") > rp3b.averaged.at("Surp@20") &&
             rp3b.averaged.at("Surp@20") > p3.averaged.at("Surp@20"),
         fmt(cf.averaged.at("Surp@20")) + " / " + fmt(rp3b.averaged.at("Surp@20")) +
             " / " + fmt(p3.averaged.at("Surp@20")));

  fs::remove_all(outdir);
  return hard_failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string section = argc > 1 ? argv[1] : "substitutes";
  int rc = 0;
  try {
    if (section == "substitutes") {
      rc = run_substitutes();
    } else if (section == "determinism") {
      rc = run_determinism();
    } else if (section == "ml1m") {
      rc = run_ml1m();
    } else {
      std::fprintf(stderr, "unknown section '%s' (substitutes|determinism|ml1m)\n",
                   section.c_str());
      return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance aborted: %s\n", e.what());
    return 1;
  }
  if (rc == 77) return 77;
  if (hard_failures > 0) {
    std::printf("%d hard criterion failure(s)\n", hard_failures);
    return 1;
  }
  if (soft_failures > 0) {
    std::printf("all hard criteria pass; %d convention-dependent absolute target(s) "
                "off\n",
                soft_failures);
  } else {
    std::printf("all criteria pass\n");
  }
  return 0;
}
