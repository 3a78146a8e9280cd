#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "rwe/errors.hpp"
#include "rwe/graph.hpp"

namespace rwe {

/// Erasure probabilities Q[origin user, destination item], evaluated lazily
/// from a closed-form strategy descriptor. Every entry lies in [0, 1); the
/// full (m+n)^2 matrix is never materialized.
class ErasureMatrix {
 public:
  /// No erasure anywhere; RWE degenerates to the plain k-step walk.
  static ErasureMatrix zero() { return ErasureMatrix(Zero{}); }

  /// Constant erasure q for every (origin, destination) pair.
  static ErasureMatrix uniform(double q) {
    if (q < 0.0 || q >= 1.0) {
      throw std::invalid_argument("ErasureMatrix::uniform: q must lie in [0, 1)");
    }
    return ErasureMatrix(Uniform{q});
  }

  /// Long-tail strategy: Q[.,j] = 1 - degree(j)^-beta, independent of the
  /// origin. High-degree destinations are erased more.
  static ErasureMatrix longtail(const FeedbackGraph& graph, double beta) {
    if (beta < 0.0) {
      throw std::invalid_argument("ErasureMatrix::longtail: beta must be >= 0");
    }
    LongTail lt;
    lt.beta = beta;
    lt.item_degrees.resize(graph.num_items());
    for (Index i = 0; i < graph.num_items(); ++i) {
      lt.item_degrees[i] = static_cast<double>(graph.item_degree(i));
    }
    return ErasureMatrix(std::move(lt));
  }

  /// Bridging strategy: a destination on the opposite ideological side of the
  /// origin user is erased at sim(u, i) = 1 - |pos_i - pos_u| / range, every
  /// other destination at the constant epsilon.
  static ErasureMatrix bridge(std::vector<double> user_positions,
                              std::vector<double> item_positions, double epsilon,
                              double nu = 1.0) {
    if (epsilon < 0.0 || epsilon >= 1.0) {
      throw std::invalid_argument("ErasureMatrix::bridge: epsilon must lie in [0, 1)");
    }
    if (!(nu > 0.0)) {
      throw std::invalid_argument("ErasureMatrix::bridge: nu must be > 0");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto* v : {&user_positions, &item_positions}) {
      for (double p : *v) {
        if (!std::isfinite(p)) throw DataError("ErasureMatrix::bridge: non-finite position");
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
    }
    if (user_positions.empty() || item_positions.empty() || !(hi - lo > 0.0)) {
      throw DataError("ErasureMatrix::bridge: degenerate position range (all positions equal)");
    }
    Bridge b;
    b.user_positions = std::move(user_positions);
    b.item_positions = std::move(item_positions);
    b.range = hi - lo;
    b.epsilon = epsilon;
    ErasureMatrix q(std::move(b));
    q.nu_ = nu;
    return q;
  }

  /// Element-wise power Q^(o nu); preserves the [0, 1) range.
  ErasureMatrix with_nu(double nu) const {
    if (!(nu > 0.0)) throw std::invalid_argument("apply_nu: nu must be > 0");
    ErasureMatrix q(*this);
    q.nu_ *= nu;
    return q;
  }

  double nu() const { return nu_; }

  /// Q[user, item], both in their own dense index space. Always in [0, 1).
  double at(Index user, Index item) const {
    double base = 0.0;
    if (std::holds_alternative<Zero>(strategy_)) {
      return 0.0;
    } else if (const auto* u = std::get_if<Uniform>(&strategy_)) {
      base = u->q;
    } else if (const auto* lt = std::get_if<LongTail>(&strategy_)) {
      const double deg = std::max(1.0, lt->item_degrees[item]);
      base = 1.0 - std::pow(deg, -lt->beta);
    } else {
      const auto& b = std::get<Bridge>(strategy_);
      const double theta = b.user_positions[user];
      const double psi = b.item_positions[item];
      if (theta * psi < 0.0) {  // opposite side: a bridge w.r.t. the user
        const double sim = 1.0 - std::abs(psi - theta) / b.range;
        base = std::clamp(sim, 0.0, 1.0 - 1e-9);
      } else {
        base = b.epsilon;
      }
    }
    return nu_ == 1.0 ? base : std::pow(base, nu_);
  }

 private:
  struct Zero {};
  struct Uniform {
    double q;
  };
  struct LongTail {
    std::vector<double> item_degrees;
    double beta;
  };
  struct Bridge {
    std::vector<double> user_positions, item_positions;
    double range;
    double epsilon;
  };

  template <typename S>
  explicit ErasureMatrix(S strategy) : strategy_(std::move(strategy)) {}

  std::variant<Zero, Uniform, LongTail, Bridge> strategy_;
  double nu_ = 1.0;
};

inline ErasureMatrix erasure_longtail(const FeedbackGraph& graph, double beta) {
  return ErasureMatrix::longtail(graph, beta);
}

inline ErasureMatrix erasure_bridge(std::vector<double> user_positions,
                                    std::vector<double> item_positions,
                                    double epsilon, double nu = 1.0) {
  return ErasureMatrix::bridge(std::move(user_positions), std::move(item_positions),
                               epsilon, nu);
}

inline ErasureMatrix apply_nu(const ErasureMatrix& q, double nu) { return q.with_nu(nu); }

}  // namespace rwe
