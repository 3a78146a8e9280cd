#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "rwe/errors.hpp"

namespace rwe {

struct InteractionRecord {
  std::string user_id;
  std::string item_id;
  long long weight = 1;
};

enum class DatasetFormat { MovielensDat, TsvEdges };

inline DatasetFormat dataset_format_from_name(const std::string& name) {
  if (name == "movielens-dat") return DatasetFormat::MovielensDat;
  if (name == "tsv-edges") return DatasetFormat::TsvEdges;
  throw DataError("unknown dataset format '" + name +
                  "' (expected movielens-dat or tsv-edges)");
}

namespace detail {

inline long long parse_count(const std::string& s, const std::string& where) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 1) {
    throw DataError(where + ": malformed count '" + s + "'");
  }
  return v;
}

}  // namespace detail

/// Streaming dataset parser. movielens-dat lines are uid::iid::rating::ts,
/// every rating kept as an implicit positive; tsv-edges lines are
/// user<TAB>item[<TAB>count]. Malformed lines report their line number.
inline std::vector<InteractionRecord> parse_dataset_stream(std::istream& is,
                                                           DatasetFormat format,
                                                           const std::string& source) {
  std::vector<InteractionRecord> records;
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    InteractionRecord rec;
    if (format == DatasetFormat::MovielensDat) {
      const auto p1 = line.find("::");
      const auto p2 = p1 == std::string::npos ? p1 : line.find("::", p1 + 2);
      const auto p3 = p2 == std::string::npos ? p2 : line.find("::", p2 + 2);
      if (p3 == std::string::npos || p1 == 0 || p2 == p1 + 2) {
        throw DataError(where + ": expected uid::iid::rating::timestamp");
      }
      rec.user_id = line.substr(0, p1);
      rec.item_id = line.substr(p1 + 2, p2 - p1 - 2);
    } else {
      const auto t1 = line.find('\t');
      if (t1 == std::string::npos || t1 == 0) {
        throw DataError(where + ": expected user<TAB>item[<TAB>count]");
      }
      const auto t2 = line.find('\t', t1 + 1);
      rec.user_id = line.substr(0, t1);
      rec.item_id = line.substr(t1 + 1, t2 == std::string::npos ? std::string::npos
                                                                : t2 - t1 - 1);
      if (rec.item_id.empty()) {
        throw DataError(where + ": empty item id");
      }
      if (t2 != std::string::npos) {
        rec.weight = detail::parse_count(line.substr(t2 + 1), where);
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<InteractionRecord> parse_dataset(const std::filesystem::path& path,
                                                    DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path.string());
  return parse_dataset_stream(in, format, path.filename().string());
}

inline void write_edges_tsv(std::ostream& os, const std::vector<InteractionRecord>& records,
                            bool with_weights = false) {
  for (const auto& r : records) {
    os << r.user_id << '\t' << r.item_id;
    if (with_weights) os << '\t' << r.weight;
    os << '\n';
  }
}

}  // namespace rwe
