#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "rwe/graph.hpp"

using rwe::FeedbackGraph;
using rwe::Index;
using rwe::MassVector;
using rwe::TransitionMatrix;

TEST_CASE("build_graph collapses duplicate interactions") {
  const auto g = FeedbackGraph::build({{"uA", "i1"}, {"uA", "i1"}, {"uB", "i1"}}, 1, 1);
  CHECK(g.num_users() == 2);
  CHECK(g.num_items() == 1);
  CHECK(g.num_edges() == 2);
}

TEST_CASE("build_graph reports when degree filtering empties the graph") {
  REQUIRE_THROWS_MATCHES(FeedbackGraph::build({{"uA", "i1"}, {"uB", "i2"}}, 1, 2),
                         rwe::DataError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("min_item_degree=2")));
  REQUIRE_THROWS_AS(FeedbackGraph::build({}, 1, 1), rwe::DataError);
}

TEST_CASE("degree filtering cascades to a fixed point") {
  // dropping i1 lowers u1's degree to 1, which min_user_degree=1 tolerates
  const auto g = FeedbackGraph::build({{"u1", "i1"}, {"u1", "i2"}, {"u2", "i2"}}, 1, 2);
  REQUIRE(g.num_users() == 2);
  REQUIRE(g.num_items() == 1);
  CHECK(g.num_edges() == 2);
  CHECK(g.item_id(0) == "i2");

  // with min_user_degree=2 the same cascade then removes both users
  REQUIRE_THROWS_AS(FeedbackGraph::build({{"u1", "i1"}, {"u1", "i2"}, {"u2", "i2"}}, 2, 2),
                    rwe::DataError);
}

TEST_CASE("dense indices follow first-seen order of surviving ids") {
  const auto g = FeedbackGraph::build(
      {{"carol", "x"}, {"alice", "y"}, {"carol", "y"}, {"bob", "x"}}, 1, 1);
  CHECK(g.user_id(0) == "carol");
  CHECK(g.user_id(1) == "alice");
  CHECK(g.user_id(2) == "bob");
  CHECK(g.item_id(0) == "x");
  CHECK(g.item_id(1) == "y");
  CHECK(g.find_user("alice") == 1);
  CHECK(g.find_item("z") == -1);
}

TEST_CASE("transition of the single-edge graph swaps the two vertices") {
  const auto g = FeedbackGraph::build({{"u", "i"}}, 1, 1);
  const auto P = rwe::transition(g);
  REQUIRE(P.dim() == 2);
  CHECK(P.row_cols(0)[0] == 1);
  CHECK(P.row_vals(0)[0] == 1.0);
  CHECK(P.row_cols(1)[0] == 0);
  CHECK(P.row_vals(1)[0] == 1.0);
}

TEST_CASE("transition rows are uniform over neighbors") {
  // node order: u1,u2,i1,i2
  const auto g = FeedbackGraph::build({{"u1", "i1"}, {"u1", "i2"}, {"u2", "i2"}}, 1, 1);
  const auto P = rwe::transition(g);
  const auto M = testutil::dense_matrix(P);
  CHECK(M[0] == std::vector<double>{0.0, 0.0, 0.5, 0.5});
  CHECK(M[3] == std::vector<double>{0.5, 0.5, 0.0, 0.0});
}

TEST_CASE("every transition row sums to one and respects the bipartite blocks") {
  rwe::Rng rng(rwe::derive_seed(7, "graph-rows"));
  for (int trial = 0; trial < 25; ++trial) {
    const auto g = testutil::random_graph(rng);
    const auto P = rwe::transition(g);
    for (Index v = 0; v < P.dim(); ++v) {
      double sum = 0.0;
      for (double x : P.row_vals(v)) sum += x;
      REQUIRE_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-12));
      const bool user_row = v < g.num_users();
      for (Index c : P.row_cols(v)) {
        REQUIRE((c >= g.num_users()) == user_row);
      }
    }
  }
}

TEST_CASE("propagate moves unit mass across the single edge") {
  const auto g = FeedbackGraph::build({{"u", "i"}}, 1, 1);
  const auto P = rwe::transition(g);
  const auto mass = rwe::propagate(P, MassVector{1.0, 0.0}, 1);
  CHECK(mass[0] == 0.0);
  CHECK(mass[1] == 1.0);
}

TEST_CASE("three-step walk probabilities match the dense oracle value") {
  const auto g = FeedbackGraph::build({{"u1", "i1"}, {"u1", "i2"}, {"u2", "i2"}}, 1, 1);
  const auto P = rwe::transition(g);
  MassVector start(4, 0.0);
  start[0] = 1.0;
  const auto mass = rwe::propagate(P, start, 3);
  CHECK_THAT(mass[2], Catch::Matchers::WithinAbs(0.375, 1e-15));
  CHECK_THAT(mass[3], Catch::Matchers::WithinAbs(0.625, 1e-15));
}

TEST_CASE("propagate agrees with the dense matrix-power oracle") {
  rwe::Rng rng(rwe::derive_seed(11, "graph-oracle"));
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testutil::random_graph(rng, 20, 20, 0.25);
    REQUIRE(g.num_users() + g.num_items() <= 50);
    const auto P = rwe::transition(g);
    const auto M = testutil::dense_matrix(P);
    const int steps = 1 + static_cast<int>(rng.below(5));
    MassVector start(P.dim(), 0.0);
    start[rng.below(g.num_users())] = 1.0;
    const auto sparse = rwe::propagate(P, start, steps);
    const auto dense = testutil::dense_propagate(M, start, steps);
    for (Index v = 0; v < P.dim(); ++v) {
      REQUIRE_THAT(sparse[v], Catch::Matchers::WithinAbs(dense[v], 1e-10));
    }
  }
}

TEST_CASE("odd steps land on items, even steps on users") {
  rwe::Rng rng(rwe::derive_seed(13, "graph-parity"));
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testutil::random_graph(rng);
    const auto P = rwe::transition(g);
    for (Index u = 0; u < g.num_users(); ++u) {
      MassVector start(P.dim(), 0.0);
      start[u] = 1.0;
      for (int steps : {1, 2, 3, 4}) {
        const auto mass = rwe::propagate(P, start, steps);
        for (Index v = 0; v < P.dim(); ++v) {
          if (mass[v] > 0.0) {
            REQUIRE((v >= g.num_users()) == (steps % 2 == 1));
          }
        }
      }
    }
  }
}

TEST_CASE("walk mass is conserved through nine steps") {
  rwe::Rng rng(rwe::derive_seed(17, "graph-mass"));
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testutil::random_graph(rng);
    const auto P = rwe::transition(g);
    MassVector start(P.dim(), 0.0);
    start[rng.below(g.num_users())] = 1.0;
    for (int steps = 1; steps <= 9; ++steps) {
      const auto mass = rwe::propagate(P, start, steps);
      double total = 0.0;
      for (double x : mass) {
        REQUIRE(x >= 0.0);
        total += x;
      }
      REQUIRE_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-10));
    }
  }
}

TEST_CASE("propagate rejects bad arguments") {
  const auto g = FeedbackGraph::build({{"u", "i"}}, 1, 1);
  const auto P = rwe::transition(g);
  CHECK_THROWS_AS(rwe::propagate(P, MassVector{1.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(rwe::propagate(P, MassVector{1.0, 0.0}, 0), std::invalid_argument);
}

TEST_CASE("train projections keep the index space and allow isolated items") {
  const auto g = FeedbackGraph::build({{"u1", "i1"}, {"u1", "i2"}, {"u2", "i2"}}, 1, 1);
  const auto t = FeedbackGraph::from_indexed_edges(g.user_ids(), g.item_ids(),
                                                   {{0, 1}, {1, 1}});
  CHECK(t.num_users() == 2);
  CHECK(t.num_items() == 2);
  CHECK(t.item_degree(0) == 0);
  CHECK(t.item_degree(1) == 2);
  const auto P = rwe::transition(t);
  CHECK(P.row_cols(2).empty());  // isolated item row stays empty
}
