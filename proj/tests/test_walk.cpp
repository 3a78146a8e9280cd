#include <cmath>
#include <map>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "rwe/walk.hpp"

using rwe::ErasureMatrix;
using rwe::FeedbackGraph;
using rwe::Index;
using rwe::RweScores;

namespace {

rwe::FeedbackGraph two_user_graph() {
  // u1-{i1,i2}, u2-{i2}; three-step row from u1 is (0.375, 0.625)
  return FeedbackGraph::build({{"u1", "i1"}, {"u1", "i2"}, {"u2", "i2"}}, 1, 1);
}

std::map<Index, double> as_map(const RweScores& s) {
  return {s.scores.begin(), s.scores.end()};
}

std::vector<double> normalized(const RweScores& s) {
  double total = 0.0;
  for (const auto& [item, v] : s.scores) total += v;
  std::vector<double> out;
  for (const auto& [item, v] : s.scores) out.push_back(v / total);
  return out;
}

}  // namespace

TEST_CASE("zero erasure degenerates to the k-step walk") {
  const auto g = two_user_graph();
  const auto P = rwe::transition(g);
  const auto scores = rwe::rwe_score(P, ErasureMatrix::zero(), 0, 3, 10);
  const auto m = as_map(scores);
  CHECK_THAT(m.at(0), Catch::Matchers::WithinAbs(0.375, 1e-15));
  CHECK_THAT(m.at(1), Catch::Matchers::WithinAbs(0.625, 1e-15));
  CHECK(scores.iterations_run == 1);  // nothing comes back to re-propagate
  CHECK(scores.residual_mass == 0.0);
}

TEST_CASE("erased mass re-propagates as a geometric series") {
  const auto g = two_user_graph();
  const auto P = rwe::transition(g);
  // Q[u1,i1] = 0.5, Q[u1,i2] = 0: only mass arriving at i1 is erased, so the
  // per-round erased fraction is r = 0.375 * 0.5.
  // positions span [-1, 3]; i1 is a bridge for u1 with sim = 1 - 2/4
  std::vector<double> upos{-1.0, 3.0};
  std::vector<double> ipos{1.0, -1.0};
  const auto q = rwe::erasure_bridge(upos, ipos, 0.0, 1.0);
  REQUIRE_THAT(q.at(0, 0), Catch::Matchers::WithinAbs(0.5, 1e-15));
  REQUIRE(q.at(0, 1) == 0.0);

  const double r = 0.375 * 0.5;
  SECTION("per-iteration residual mass is r^t") {
    for (int iters = 1; iters <= 10; ++iters) {
      const auto s = rwe::rwe_score(P, q, 0, 3, iters);
      REQUIRE_THAT(s.residual_mass,
                   Catch::Matchers::WithinAbs(std::pow(r, iters), 1e-15));
    }
  }
  SECTION("converged score ratio is 10/3") {
    const auto s = rwe::rwe_score(P, q, 0, 3, 10);
    const auto m = as_map(s);
    CHECK_THAT(m.at(1) / m.at(0), Catch::Matchers::WithinAbs(10.0 / 3.0, 1e-9));
  }
  SECTION("closed form matches the hand-computed limit") {
    const auto s = rwe::rwe_closed_form(P, q, 0, 3);
    const auto m = as_map(s);
    CHECK_THAT(m.at(0), Catch::Matchers::WithinAbs(0.1875 / 0.8125, 1e-12));
    CHECK_THAT(m.at(1), Catch::Matchers::WithinAbs(0.625 / 0.8125, 1e-12));
  }
  SECTION("50 iterations reach the closed form elementwise") {
    const auto iterative = rwe::rwe_score(P, q, 0, 3, 50);
    const auto closed = rwe::rwe_closed_form(P, q, 0, 3);
    const auto ni = normalized(iterative), nc = normalized(closed);
    for (std::size_t e = 0; e < ni.size(); ++e) {
      REQUIRE_THAT(ni[e], Catch::Matchers::WithinAbs(nc[e], 1e-10));
    }
  }
}

TEST_CASE("uniform erasure never changes the ranking") {
  rwe::Rng rng(rwe::derive_seed(31, "walk-uniform"));
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testutil::random_graph(rng);
    const auto P = rwe::transition(g);
    const auto uniform = ErasureMatrix::uniform(0.3 + rng.uniform01() * 0.6);
    for (Index u = 0; u < g.num_users(); ++u) {
      const auto plain = rwe::rwe_score(P, ErasureMatrix::zero(), u, 3, 10);
      const auto erased = rwe::rwe_score(P, uniform, u, 3, 10);
      REQUIRE(plain.scores.size() == erased.scores.size());
      auto order = [](const RweScores& s) {
        std::vector<Index> idx;
        std::vector<std::pair<double, Index>> tmp;
        for (const auto& [item, v] : s.scores) tmp.emplace_back(-v, item);
        std::sort(tmp.begin(), tmp.end());
        for (const auto& [nv, item] : tmp) idx.push_back(item);
        return idx;
      };
      REQUIRE(order(plain) == order(erased));
    }
  }
}

TEST_CASE("iterative scores match the closed form on random instances") {
  rwe::Rng rng(rwe::derive_seed(37, "walk-oracle"));
  for (int trial = 0; trial < 25; ++trial) {
    const auto g = testutil::random_graph(rng, 10, 8, 0.35);
    const auto P = rwe::transition(g);
    std::vector<double> upos(g.num_users()), ipos(g.num_items());
    for (double& p : upos) p = rng.normal();
    for (double& p : ipos) p = rng.normal();
    const auto q = rwe::erasure_bridge(upos, ipos, 0.9, 0.5 + rng.uniform01() * 2.0);
    for (const int k : {3, 5}) {
      for (Index u = 0; u < g.num_users(); ++u) {
        const auto iterative = normalized(rwe::rwe_score(P, q, u, k, 50));
        const auto closed = normalized(rwe_closed_form(P, q, u, k));
        REQUIRE(iterative.size() == closed.size());
        for (std::size_t e = 0; e < iterative.size(); ++e) {
          REQUIRE_THAT(iterative[e], Catch::Matchers::WithinAbs(closed[e], 1e-10));
        }
      }
    }
  }
}

TEST_CASE("raising one erasure entry never raises that item's share") {
  // degree(i1) = 1 pins Q[., i1] at 0 for every beta, while Q[., i2]
  // grows with beta; i2's normalized score must not increase.
  const auto g = two_user_graph();
  const auto P = rwe::transition(g);
  double previous = 1.0;
  for (double beta : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    const auto q = rwe::erasure_longtail(g, beta);
    REQUIRE(q.at(0, 0) == 0.0);
    const auto n = normalized(rwe::rwe_score(P, q, 0, 3, 50));
    REQUIRE(n[1] <= previous + 1e-12);
    previous = n[1];
  }
}

TEST_CASE("residual mass vanishes quickly when erasure is at most one half") {
  rwe::Rng rng(rwe::derive_seed(41, "walk-convergence"));
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testutil::random_graph(rng);
    const auto P = rwe::transition(g);
    for (Index u = 0; u < g.num_users(); ++u) {
      // q = 0.5 exactly is the worst case: residual == 0.5^10 up to the
      // rounding of the arrival-mass sum
      REQUIRE(rwe::rwe_score(P, ErasureMatrix::uniform(0.5), u, 3, 10).residual_mass <=
              std::pow(0.5, 10) * (1.0 + 1e-12));
      REQUIRE(rwe::rwe_score(P, ErasureMatrix::uniform(0.45), u, 3, 10).residual_mass <
              std::pow(0.5, 10));
    }
  }
}

TEST_CASE("rwe_score rejects invalid walks") {
  const auto g = two_user_graph();
  const auto P = rwe::transition(g);
  const auto q = ErasureMatrix::zero();
  CHECK_THROWS_AS(rwe::rwe_score(P, q, 0, 2, 10), std::invalid_argument);  // even k
  CHECK_THROWS_AS(rwe::rwe_score(P, q, 0, 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(rwe::rwe_score(P, q, 2, 3, 10), std::invalid_argument);  // item vertex
  CHECK_THROWS_AS(rwe::rwe_score(P, q, 0, 3, 0), std::invalid_argument);
}
