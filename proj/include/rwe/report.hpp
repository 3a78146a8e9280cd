#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwe/errors.hpp"

namespace rwe {

inline std::string hex_u64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Metric bundle for one algorithm/grid point: per-split values plus their
/// means, with enough metadata to reproduce the run.
struct EvalReport {
  std::string algorithm;
  std::string gridpoint;  // directory-name encoding of the hyperparameters
  std::map<std::string, std::string> hyperparameters;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> split_fingerprints;
  std::vector<std::map<std::string, double>> per_split;
  std::map<std::string, double> averaged;

  /// Mean over all splits, per metric present in every split.
  void compute_averages() {
    averaged.clear();
    if (per_split.empty()) return;
    for (const auto& [name, v0] : per_split.front()) {
      double sum = 0.0;
      bool everywhere = true;
      for (const auto& split : per_split) {
        auto it = split.find(name);
        if (it == split.end()) {
          everywhere = false;
          break;
        }
        sum += it->second;
      }
      if (everywhere) averaged[name] = sum / static_cast<double>(per_split.size());
    }
  }

  std::vector<double> split_values(const std::string& metric) const {
    std::vector<double> values;
    for (const auto& split : per_split) {
      auto it = split.find(metric);
      if (it == split.end()) {
        throw DataError("report for '" + algorithm + "' has no metric '" + metric + "'");
      }
      values.push_back(it->second);
    }
    return values;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["algorithm"] = algorithm;
    j["gridpoint"] = gridpoint;
    j["hyperparameters"] = hyperparameters;
    j["seed"] = seed;
    nlohmann::json fps = nlohmann::json::array();
    for (std::uint64_t f : split_fingerprints) fps.push_back(hex_u64(f));
    j["split_fingerprints"] = fps;
    j["per_split"] = per_split;
    j["averaged"] = averaged;
    return j;
  }

  static EvalReport from_json(const nlohmann::json& j) {
    EvalReport r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.gridpoint = j.value("gridpoint", std::string{});
    r.hyperparameters = j.at("hyperparameters").get<std::map<std::string, std::string>>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& f : j.at("split_fingerprints")) {
      r.split_fingerprints.push_back(
          std::stoull(f.get<std::string>(), nullptr, 16));
    }
    r.per_split = j.at("per_split").get<std::vector<std::map<std::string, double>>>();
    r.averaged = j.at("averaged").get<std::map<std::string, double>>();
    return r;
  }

  /// Aligned-column table for humans: one metric per row, one column per
  /// split plus the mean.
  void write_tsv(std::ostream& os) const {
    std::ostringstream head;
    head << "metric";
    for (std::size_t s = 0; s < per_split.size(); ++s) head << "\tsplit-" << s;
    head << "\tmean";
    os << head.str() << '\n';
    for (const auto& [name, mean] : averaged) {
      os << name;
      char buf[40];
      for (const auto& split : per_split) {
        std::snprintf(buf, sizeof(buf), "%.6f", split.at(name));
        os << '\t' << buf;
      }
      std::snprintf(buf, sizeof(buf), "%.6f", mean);
      os << '\t' << buf << '\n';
    }
  }
};

}  // namespace rwe
