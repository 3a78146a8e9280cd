#pragma once

#include <utility>
#include <vector>

#include "rwe/erasure.hpp"
#include "rwe/graph.hpp"

namespace rwe {

/// Retained (un-erased) walk mass per destination item for one origin user.
/// Scores are unnormalized; only the ranking is contractual. Items outside
/// the k-hop neighborhood of the origin have no entry.
struct RweScores {
  Index origin = -1;
  std::vector<std::pair<Index, double>> scores;  // (item, mass), item ascending
  int iterations_run = 0;
  double residual_mass = 0.0;
};

namespace detail {

// Mass below this is treated as fully erased and stops the iteration.
inline constexpr double kResidualFloor = 1e-12;

struct KStepRow {
  std::vector<Index> items;   // ascending
  std::vector<double> probs;  // k-step arrival probability
  std::vector<double> q;      // erasure per destination
  double erased_fraction = 0.0;  // sum_j p_j * q_j
};

inline KStepRow k_step_row(const TransitionMatrix& P, const ErasureMatrix& Q,
                           Index origin, int k) {
  if (k < 1 || k % 2 == 0) {
    throw std::invalid_argument("rwe: walk length k must be a positive odd count");
  }
  if (origin < 0 || origin >= P.num_users()) {
    throw std::invalid_argument("rwe: origin is not a user vertex");
  }
  MassVector start(P.dim(), 0.0);
  start[origin] = 1.0;
  const MassVector mass = propagate(P, std::move(start), k);
  KStepRow row;
  for (Index j = 0; j < P.num_items(); ++j) {
    const double p = mass[P.num_users() + j];
    if (p > 0.0) {
      const double q = Q.at(origin, j);
      row.items.push_back(j);
      row.probs.push_back(p);
      row.q.push_back(q);
      row.erased_fraction += p * q;
    }
  }
  return row;
}

}  // namespace detail

/// Random walk with erasure, iterative form. Each round starts k-step walks
/// from the origin with the mass returned by the previous round's erasures;
/// the un-erased arrival mass accumulates as the score. Stops after
/// `iterations` rounds or once the returned mass falls below 1e-12.
inline RweScores rwe_score(const TransitionMatrix& P, const ErasureMatrix& Q,
                           Index origin, int k = 3, int iterations = 10) {
  if (iterations < 1) throw std::invalid_argument("rwe_score: iterations must be >= 1");
  const auto row = detail::k_step_row(P, Q, origin, k);
  RweScores out;
  out.origin = origin;
  std::vector<double> retained(row.items.size(), 0.0);
  double mass = 1.0;
  for (int t = 0; t < iterations; ++t) {
    if (mass < detail::kResidualFloor) break;
    for (std::size_t e = 0; e < row.items.size(); ++e) {
      retained[e] += mass * row.probs[e] * (1.0 - row.q[e]);
    }
    mass *= row.erased_fraction;
    out.iterations_run = t + 1;
  }
  out.residual_mass = mass;
  out.scores.reserve(row.items.size());
  for (std::size_t e = 0; e < row.items.size(); ++e) {
    out.scores.emplace_back(row.items[e], retained[e]);
  }
  return out;
}

/// Geometric-series limit of rwe_score: score_j = p_j (1 - Q_j) / (1 - r)
/// with r the per-round erased fraction. Serves as the closed-form oracle
/// for the iterative scheme.
inline RweScores rwe_closed_form(const TransitionMatrix& P, const ErasureMatrix& Q,
                                 Index origin, int k = 3) {
  const auto row = detail::k_step_row(P, Q, origin, k);
  // r < 1 always: Q < 1 strictly and the arrival mass sums to at most 1.
  if (!(row.erased_fraction < 1.0)) {
    throw std::logic_error("rwe_closed_form: erased fraction >= 1");
  }
  const double scale = 1.0 / (1.0 - row.erased_fraction);
  RweScores out;
  out.origin = origin;
  out.scores.reserve(row.items.size());
  for (std::size_t e = 0; e < row.items.size(); ++e) {
    out.scores.emplace_back(row.items[e], row.probs[e] * (1.0 - row.q[e]) * scale);
  }
  return out;
}

}  // namespace rwe
