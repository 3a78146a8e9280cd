#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rwe/errors.hpp"
#include "rwe/random.hpp"
#include "rwe/types.hpp"

namespace rwe {

inline double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(1 + exp(x)) without overflow for large |x|.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// Pi = -(pos_a - pos_b)^2 + bias_a + bias_b; the endorsement probability is
/// sigmoid(Pi).
inline double linear_predictor(double pos_a, double pos_b, double bias_a, double bias_b) {
  const double d = pos_a - pos_b;
  return -d * d + bias_a + bias_b;
}

enum class EntityKind { User, Elite, Content };

inline const char* entity_kind_name(EntityKind k) {
  switch (k) {
    case EntityKind::User: return "user";
    case EntityKind::Elite: return "elite";
    default: return "content";
  }
}

enum class ConfidenceWeighting { Unit, LogCount };

/// Sparse endorsement matrices R (user x elite) and S (user x content) with
/// per-observation confidence weights. Unobserved pairs are treated as
/// negatives with weight zero.
class EndorsementData {
 public:
  struct Observation {
    Index col;
    double weight;
  };

  /// Builds from raw (user_id, target_id, count) triples for each graph.
  /// Weights are 1 or log(1 + count) depending on the weighting policy.
  static EndorsementData from_records(
      const std::vector<std::tuple<std::string, std::string, long long>>& endorsements,
      const std::vector<std::tuple<std::string, std::string, long long>>& shares,
      ConfidenceWeighting weighting = ConfidenceWeighting::Unit) {
    EndorsementData d;
    auto intern = [](std::unordered_map<std::string, Index>& lookup,
                     std::vector<std::string>& ids, const std::string& id) {
      auto [it, fresh] = lookup.try_emplace(id, static_cast<Index>(ids.size()));
      if (fresh) ids.push_back(id);
      return it->second;
    };
    auto weight_of = [&](long long count) {
      if (count < 1) throw DataError("EndorsementData: counts must be >= 1");
      return weighting == ConfidenceWeighting::Unit
                 ? 1.0
                 : std::log1p(static_cast<double>(count));
    };
    std::unordered_map<std::string, Index> umap, emap, cmap;
    std::vector<std::tuple<Index, Index, double>> r, s;
    for (const auto& [uid, eid, count] : endorsements) {
      r.emplace_back(intern(umap, d.user_ids_, uid), intern(emap, d.elite_ids_, eid),
                     weight_of(count));
    }
    for (const auto& [uid, cid, count] : shares) {
      s.emplace_back(intern(umap, d.user_ids_, uid), intern(cmap, d.content_ids_, cid),
                     weight_of(count));
    }
    if (r.empty() && s.empty()) throw DataError("EndorsementData: no observations");
    d.r_by_user_.resize(d.num_users());
    d.s_by_user_.resize(d.num_users());
    for (const auto& [u, e, w] : r) d.r_by_user_[u].push_back({e, w});
    for (const auto& [u, c, w] : s) d.s_by_user_[u].push_back({c, w});
    auto dedup = [](std::vector<Observation>& obs) {
      std::stable_sort(obs.begin(), obs.end(),
                       [](const Observation& a, const Observation& b) {
                         return a.col < b.col;
                       });
      // duplicate (user, target) rows collapse to the first weight
      obs.erase(std::unique(obs.begin(), obs.end(),
                            [](const Observation& a, const Observation& b) {
                              return a.col == b.col;
                            }),
                obs.end());
    };
    for (auto& obs : d.r_by_user_) dedup(obs);
    for (auto& obs : d.s_by_user_) dedup(obs);
    for (const auto& obs : d.r_by_user_) d.r_pairs_ += static_cast<std::int64_t>(obs.size());
    for (const auto& obs : d.s_by_user_) d.s_pairs_ += static_cast<std::int64_t>(obs.size());
    return d;
  }

  /// Same users and elites, no content-share graph (Eq.-7-style data).
  EndorsementData without_contents() const {
    EndorsementData d(*this);
    d.content_ids_.clear();
    d.s_by_user_.assign(num_users(), {});
    d.s_pairs_ = 0;
    return d;
  }

  Index num_users() const { return static_cast<Index>(user_ids_.size()); }
  Index num_elites() const { return static_cast<Index>(elite_ids_.size()); }
  Index num_contents() const { return static_cast<Index>(content_ids_.size()); }
  std::int64_t num_endorsements() const { return r_pairs_; }
  std::int64_t num_shares() const { return s_pairs_; }

  const std::vector<Observation>& endorsements_of(Index u) const { return r_by_user_[u]; }
  const std::vector<Observation>& shares_of(Index u) const { return s_by_user_[u]; }

  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& elite_ids() const { return elite_ids_; }
  const std::vector<std::string>& content_ids() const { return content_ids_; }

  /// Resolves an external id to (kind, index), searching users, then elites,
  /// then contents.
  std::pair<EntityKind, Index> find_entity(const std::string& id) const {
    for (Index u = 0; u < num_users(); ++u) {
      if (user_ids_[u] == id) return {EntityKind::User, u};
    }
    for (Index e = 0; e < num_elites(); ++e) {
      if (elite_ids_[e] == id) return {EntityKind::Elite, e};
    }
    for (Index c = 0; c < num_contents(); ++c) {
      if (content_ids_[c] == id) return {EntityKind::Content, c};
    }
    throw DataError("align_sign: anchor entity '" + id + "' not found");
  }

 private:
  std::vector<std::string> user_ids_, elite_ids_, content_ids_;
  std::vector<std::vector<Observation>> r_by_user_, s_by_user_;
  std::int64_t r_pairs_ = 0, s_pairs_ = 0;
};

/// One-dimensional ideal points and biases for users (theta, alpha), elites
/// (phi, beta_e) and content (psi, gamma), plus the fit hyperparameters.
struct IdealPointModel {
  std::vector<double> theta, phi, psi;
  std::vector<double> alpha, beta_e, gamma;
  double lambda = 0.1;
  double mu = 1.0;
  double prior_sigma = 1.0;

  // fit diagnostics
  bool converged = false;
  int epochs_run = 0;
  double final_grad_norm = 0.0;
  std::vector<double> objective_trace;

  double position_of(EntityKind kind, Index index) const {
    switch (kind) {
      case EntityKind::User: return theta.at(index);
      case EntityKind::Elite: return phi.at(index);
      default: return psi.at(index);
    }
  }
};

struct IdeologyGradients {
  std::vector<double> theta, phi, psi, alpha, beta_e, gamma;

  double norm() const {
    double s = 0.0;
    for (const auto* v : {&theta, &phi, &psi, &alpha, &beta_e, &gamma}) {
      for (double g : *v) s += g * g;
    }
    return std::sqrt(s);
  }
};

struct FitConfig {
  double lambda = 0.1;
  double mu = 1.0;
  double learning_rate = 0.05;
  int max_epochs = 500;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  ConfidenceWeighting weighting = ConfidenceWeighting::Unit;
  /// Above this many user x target pairs the exact sums switch to uniform
  /// negative sampling, resampled each epoch.
  std::int64_t full_sum_limit = 10'000'000;
  int negatives_per_positive = 5;
};

namespace detail {

/// Negative pairs drawn for one epoch (empty in full-summation mode).
struct EpochPairs {
  bool full_sum = true;
  std::vector<std::pair<Index, Index>> r_negatives, s_negatives;
};

inline bool wants_full_sum(const EndorsementData& data, std::int64_t limit) {
  const std::int64_t targets = data.num_elites() + data.num_contents();
  return static_cast<std::int64_t>(data.num_users()) * targets <= limit;
}

inline EpochPairs sample_epoch_pairs(const EndorsementData& data, const FitConfig& cfg,
                                     int epoch) {
  EpochPairs pairs;
  if (wants_full_sum(data, cfg.full_sum_limit)) return pairs;
  pairs.full_sum = false;
  Rng rng(derive_seed(cfg.seed, "ideology-negatives", static_cast<std::uint64_t>(epoch)));
  auto draw = [&](Index user, const std::vector<EndorsementData::Observation>& observed,
                  Index num_targets, std::vector<std::pair<Index, Index>>& out) {
    for (std::size_t k = 0; k < observed.size() * cfg.negatives_per_positive; ++k) {
      Index t = -1;
      for (int tries = 0; tries < 50; ++tries) {
        t = static_cast<Index>(rng.below(num_targets));
        const auto it = std::lower_bound(
            observed.begin(), observed.end(), t,
            [](const EndorsementData::Observation& o, Index v) { return o.col < v; });
        if (it == observed.end() || it->col != t) break;
        t = -1;
      }
      if (t >= 0) out.emplace_back(user, t);
    }
  };
  for (Index u = 0; u < data.num_users(); ++u) {
    if (data.num_elites() > 0) draw(u, data.endorsements_of(u), data.num_elites(), pairs.r_negatives);
    if (data.num_contents() > 0) draw(u, data.shares_of(u), data.num_contents(), pairs.s_negatives);
  }
  return pairs;
}

/// Applies fn(u, target, weight) to every pair the current policy covers:
/// all of U x T in full-sum mode, observed pairs plus the epoch's sampled
/// negatives otherwise.
template <typename Fn>
inline void for_pairs(const EndorsementData& data, bool use_r, const EpochPairs& pairs,
                      Fn&& fn) {
  const Index num_targets = use_r ? data.num_elites() : data.num_contents();
  if (num_targets == 0) return;
  if (pairs.full_sum) {
    for (Index u = 0; u < data.num_users(); ++u) {
      const auto& observed = use_r ? data.endorsements_of(u) : data.shares_of(u);
      std::size_t p = 0;
      for (Index t = 0; t < num_targets; ++t) {
        double w = 0.0;
        if (p < observed.size() && observed[p].col == t) w = observed[p++].weight;
        fn(u, t, w);
      }
    }
    return;
  }
  for (Index u = 0; u < data.num_users(); ++u) {
    const auto& observed = use_r ? data.endorsements_of(u) : data.shares_of(u);
    for (const auto& obs : observed) fn(u, obs.col, obs.weight);
  }
  for (const auto& [u, t] : (use_r ? pairs.r_negatives : pairs.s_negatives)) {
    fn(u, t, 0.0);
  }
}

inline double objective(const IdealPointModel& m, const EndorsementData& data,
                        const EpochPairs& pairs) {
  double obj = 0.0;
  for_pairs(data, true, pairs, [&](Index u, Index e, double a) {
    const double pi = linear_predictor(m.theta[u], m.phi[e], m.alpha[u], m.beta_e[e]);
    obj += m.mu * (a * pi - softplus(pi));
  });
  for_pairs(data, false, pairs, [&](Index u, Index i, double b) {
    const double pi = linear_predictor(m.theta[u], m.psi[i], m.alpha[u], m.gamma[i]);
    obj += b * pi - softplus(pi);
  });
  double reg = 0.0;
  for (const auto* v : {&m.theta, &m.phi, &m.psi}) {
    for (double x : *v) reg += x * x;
  }
  return obj - 0.5 * m.lambda * reg;
}

enum class Block { Theta, Phi, Psi, Alpha, BetaE, Gamma };

inline std::vector<double>& block_params(IdealPointModel& m, Block b) {
  switch (b) {
    case Block::Theta: return m.theta;
    case Block::Phi: return m.phi;
    case Block::Psi: return m.psi;
    case Block::Alpha: return m.alpha;
    case Block::BetaE: return m.beta_e;
    default: return m.gamma;
  }
}

inline std::vector<double> block_gradient(const IdealPointModel& m,
                                          const EndorsementData& data,
                                          const EpochPairs& pairs, Block b) {
  const bool needs_r = b != Block::Psi && b != Block::Gamma;
  const bool needs_s = b != Block::Phi && b != Block::BetaE;
  std::vector<double> g;
  switch (b) {
    case Block::Theta:
    case Block::Alpha: g.assign(m.theta.size(), 0.0); break;
    case Block::Phi:
    case Block::BetaE: g.assign(m.phi.size(), 0.0); break;
    default: g.assign(m.psi.size(), 0.0); break;
  }
  if (needs_r) {
    for_pairs(data, true, pairs, [&](Index u, Index e, double a) {
      const double pi = linear_predictor(m.theta[u], m.phi[e], m.alpha[u], m.beta_e[e]);
      const double c = m.mu * (a - sigmoid(pi));
      switch (b) {
        case Block::Theta: g[u] += c * (-2.0 * (m.theta[u] - m.phi[e])); break;
        case Block::Phi: g[e] += c * (2.0 * (m.theta[u] - m.phi[e])); break;
        case Block::Alpha: g[u] += c; break;
        case Block::BetaE: g[e] += c; break;
        default: break;
      }
    });
  }
  if (needs_s) {
    for_pairs(data, false, pairs, [&](Index u, Index i, double bw) {
      const double pi = linear_predictor(m.theta[u], m.psi[i], m.alpha[u], m.gamma[i]);
      const double c = bw - sigmoid(pi);
      switch (b) {
        case Block::Theta: g[u] += c * (-2.0 * (m.theta[u] - m.psi[i])); break;
        case Block::Psi: g[i] += c * (2.0 * (m.theta[u] - m.psi[i])); break;
        case Block::Alpha: g[u] += c; break;
        case Block::Gamma: g[i] += c; break;
        default: break;
      }
    });
  }
  if (b == Block::Theta) {
    for (std::size_t u = 0; u < g.size(); ++u) g[u] -= m.lambda * m.theta[u];
  } else if (b == Block::Phi) {
    for (std::size_t e = 0; e < g.size(); ++e) g[e] -= m.lambda * m.phi[e];
  } else if (b == Block::Psi) {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= m.lambda * m.psi[i];
  }
  return g;
}

}  // namespace detail

/// Exact joint log-posterior (up to a constant): the full U x E and U x I
/// sums with unobserved pairs as weight-0 negatives, minus the L2 prior on
/// the positions.
inline double log_likelihood(const IdealPointModel& model, const EndorsementData& data) {
  if (static_cast<Index>(model.theta.size()) != data.num_users() ||
      static_cast<Index>(model.phi.size()) != data.num_elites() ||
      static_cast<Index>(model.psi.size()) != data.num_contents()) {
    throw std::invalid_argument("log_likelihood: model/data dimension mismatch");
  }
  return detail::objective(model, data, detail::EpochPairs{});
}

/// Exact analytic partials of the joint objective, one vector per block.
inline IdeologyGradients gradients(const IdealPointModel& model, const EndorsementData& data) {
  detail::EpochPairs full;
  IdeologyGradients g;
  g.theta = detail::block_gradient(model, data, full, detail::Block::Theta);
  g.phi = detail::block_gradient(model, data, full, detail::Block::Phi);
  g.psi = detail::block_gradient(model, data, full, detail::Block::Psi);
  g.alpha = detail::block_gradient(model, data, full, detail::Block::Alpha);
  g.beta_e = detail::block_gradient(model, data, full, detail::Block::BetaE);
  g.gamma = detail::block_gradient(model, data, full, detail::Block::Gamma);
  return g;
}

/// Block-alternating gradient ascent on the joint objective, cycling
/// theta -> phi -> psi -> alpha -> beta_e -> gamma each epoch. Positions
/// initialize from Normal(0, 1) under the config seed, biases from zero.
/// Any step that would decrease the objective is halved until it does not.
inline IdealPointModel fit(const EndorsementData& data, const FitConfig& config) {
  if (data.num_users() == 0 || (data.num_elites() == 0 && data.num_contents() == 0)) {
    throw DataError("fit: degenerate data (no users or no targets)");
  }
  for (Index u = 0; u < data.num_users(); ++u) {
    if (data.endorsements_of(u).empty() && data.shares_of(u).empty()) {
      throw DataError("fit: degenerate data (user '" + data.user_ids()[u] +
                      "' has no observations)");
    }
  }

  IdealPointModel m;
  m.lambda = config.lambda;
  m.mu = config.mu;
  m.prior_sigma = 1.0;
  Rng rng(derive_seed(config.seed, "ideology-init"));
  m.theta.resize(data.num_users());
  m.phi.resize(data.num_elites());
  m.psi.resize(data.num_contents());
  for (auto* v : {&m.theta, &m.phi, &m.psi}) {
    for (double& x : *v) x = rng.normal() * m.prior_sigma;
  }
  m.alpha.assign(data.num_users(), 0.0);
  m.beta_e.assign(data.num_elites(), 0.0);
  m.gamma.assign(data.num_contents(), 0.0);

  using detail::Block;
  constexpr Block kBlocks[] = {Block::Theta, Block::Phi,   Block::Psi,
                               Block::Alpha, Block::BetaE, Block::Gamma};
  std::unordered_map<int, double> block_lr;
  for (Block b : kBlocks) block_lr[static_cast<int>(b)] = config.learning_rate;

  constexpr int kMaxHalvings = 60;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto pairs = detail::sample_epoch_pairs(data, config, epoch);
    double obj = detail::objective(m, data, pairs);
    if (!std::isfinite(obj)) {
      throw std::runtime_error("fit: objective became non-finite at epoch " +
                               std::to_string(epoch));
    }
    double grad_norm_sq = 0.0;
    for (Block b : kBlocks) {
      auto& params = detail::block_params(m, b);
      if (params.empty()) continue;
      const auto grad = detail::block_gradient(m, data, pairs, b);
      for (double g : grad) grad_norm_sq += g * g;
      const std::vector<double> saved = params;
      double lr = block_lr[static_cast<int>(b)];
      bool accepted = false;
      for (int attempt = 0; attempt < kMaxHalvings; ++attempt) {
        for (std::size_t p = 0; p < params.size(); ++p) {
          params[p] = saved[p] + lr * grad[p];
        }
        const double candidate = detail::objective(m, data, pairs);
        if (std::isfinite(candidate) && candidate >= obj) {
          obj = candidate;
          block_lr[static_cast<int>(b)] = lr;
          accepted = true;
          break;
        }
        lr *= 0.5;
      }
      if (!accepted) params = saved;  // gradient is numerically flat here
    }
    m.epochs_run = epoch + 1;
    m.objective_trace.push_back(obj);
    m.final_grad_norm = std::sqrt(grad_norm_sq);
    if (m.final_grad_norm < config.tolerance) {
      m.converged = true;
      break;
    }
  }
  return m;
}

/// Eq.-7-style fit from the elite-endorsement graph alone (no content terms,
/// no mu factor). With mu = 1 this coincides with fit() on S-free data.
inline IdealPointModel elite_only_fit(const EndorsementData& data, FitConfig config) {
  config.mu = 1.0;
  return fit(data.without_contents(), config);
}

/// Resolves the reflection symmetry of the objective: negates every position
/// iff the anchor's sign differs from the desired one. Biases are unchanged
/// and the likelihood is invariant.
inline IdealPointModel align_sign(IdealPointModel model, EntityKind kind, Index index,
                                  int desired_sign) {
  if (desired_sign != 1 && desired_sign != -1) {
    throw std::invalid_argument("align_sign: desired_sign must be +1 or -1");
  }
  const double pos = model.position_of(kind, index);  // throws if missing
  if (pos * desired_sign < 0.0) {
    for (auto* v : {&model.theta, &model.phi, &model.psi}) {
      for (double& x : *v) x = -x;
    }
  }
  return model;
}

enum class Leaning { Left, Center, Right };

/// Thresholds at +-0.5; boundary values are Center.
inline Leaning classify(double position) {
  if (position < -0.5) return Leaning::Left;
  if (position > 0.5) return Leaning::Right;
  return Leaning::Center;
}

inline const char* leaning_name(Leaning l) {
  switch (l) {
    case Leaning::Left: return "Left";
    case Leaning::Right: return "Right";
    default: return "Center";
  }
}

/// TSV model serialization: entity_kind, external_id, position, bias.
inline void write_positions_tsv(std::ostream& os, const IdealPointModel& model,
                                const EndorsementData& data) {
  char buf[64];
  auto row = [&](const char* kind, const std::string& id, double pos, double bias) {
    std::snprintf(buf, sizeof(buf), "%.10g\t%.10g", pos, bias);
    os << kind << '\t' << id << '\t' << buf << '\n';
  };
  for (Index u = 0; u < data.num_users(); ++u) {
    row("user", data.user_ids()[u], model.theta[u], model.alpha[u]);
  }
  for (Index e = 0; e < data.num_elites(); ++e) {
    row("elite", data.elite_ids()[e], model.phi[e], model.beta_e[e]);
  }
  for (Index c = 0; c < data.num_contents(); ++c) {
    row("content", data.content_ids()[c], model.psi[c], model.gamma[c]);
  }
}

/// Positions loaded back from the TSV form, keyed by (kind, external id).
class PositionTable {
 public:
  static PositionTable read_tsv(std::istream& is, const std::string& source = "<positions>") {
    PositionTable t;
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      const auto where = source + ":" + std::to_string(lineno);
      std::array<std::string, 4> f;
      std::size_t pos = 0;
      for (int i = 0; i < 4; ++i) {
        const auto tab = line.find('\t', pos);
        if (i < 3 && tab == std::string::npos) {
          throw DataError(where + ": expected 4 tab-separated fields");
        }
        f[i] = line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos);
        pos = tab + 1;
      }
      int kind;
      if (f[0] == "user") kind = 0;
      else if (f[0] == "elite") kind = 1;
      else if (f[0] == "content") kind = 2;
      else throw DataError(where + ": unknown entity kind '" + f[0] + "'");
      try {
        t.maps_[kind][f[1]] = {std::stod(f[2]), std::stod(f[3])};
      } catch (const std::exception&) {
        throw DataError(where + ": malformed position or bias");
      }
    }
    return t;
  }

  /// Position of a user id, or NaN when absent.
  double user_position(const std::string& id) const { return get(0, id); }
  /// Position of an item id, checking content then elite kinds.
  double item_position(const std::string& id) const {
    const double c = get(2, id);
    return std::isnan(c) ? get(1, id) : c;
  }

  std::size_t size() const {
    return maps_[0].size() + maps_[1].size() + maps_[2].size();
  }

 private:
  double get(int kind, const std::string& id) const {
    auto it = maps_[kind].find(id);
    return it == maps_[kind].end() ? std::nan("") : it->second.first;
  }
  std::unordered_map<std::string, std::pair<double, double>> maps_[3];
};

}  // namespace rwe
