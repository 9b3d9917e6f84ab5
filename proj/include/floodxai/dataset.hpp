/*
 * Copyright 2026 The floodxai Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FLOODXAI_DATASET_HPP_
#define FLOODXAI_DATASET_HPP_

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "floodxai/common.hpp"

namespace floodxai {

struct RainfallRecord {
  int year = 0;
  // Rainfall depth in mm per feature column, JAN..DEC for the standard
  // schema. Missing cells are kMissing until impute_missing runs.
  FeatureVector monthly_mm;
  std::optional<double> annual_mm;
  int flood = 0;
  // Set when annual_mm disagrees with the monthly sum by more than 1 mm.
  bool annual_mismatch = false;
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<RainfallRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::size_t num_features() const { return feature_names.size(); }

  FeatureView row(std::size_t i) const { return records[i].monthly_mm; }

  std::vector<FeatureVector> rows() const {
    std::vector<FeatureVector> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.monthly_mm);
    return out;
  }

  std::vector<int> labels() const {
    std::vector<int> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.flood);
    return out;
  }

  const RainfallRecord* find_year(int year) const {
    for (const auto& r : records) {
      if (r.year == year) return &r;
    }
    return nullptr;
  }

  bool has_missing() const {
    for (const auto& r : records) {
      for (double v : r.monthly_mm) {
        if (is_missing(v)) return true;
      }
    }
    return false;
  }

  Dataset subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.feature_names = feature_names;
    out.records.reserve(indices.size());
    for (std::size_t i : indices) out.records.push_back(records.at(i));
    return out;
  }
};

// Column mapping for the input CSV. Header matching is case-insensitive and
// ignores surrounding whitespace.
struct CsvSchema {
  std::string year_column = "YEAR";
  std::vector<std::string> feature_columns = {month_names().begin(),
                                              month_names().end()};
  std::string label_column = "FLOODS";
  // Optional; any header starting with this prefix matches ("ANNUAL
  // RAINFALL" included).
  std::string annual_prefix = "ANNUAL";
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Splits one CSV line, honoring double-quoted fields with "" escapes.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

inline std::optional<double> parse_number(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

inline void flag_annual(RainfallRecord& record) {
  if (!record.annual_mm) {
    record.annual_mismatch = false;
    return;
  }
  double sum = 0.0;
  for (double v : record.monthly_mm) {
    if (is_missing(v)) {
      record.annual_mismatch = false;
      return;
    }
    sum += v;
  }
  record.annual_mismatch = std::abs(sum - *record.annual_mm) > 1.0;
}

}  // namespace detail

inline bool operator==(const RainfallRecord& a, const RainfallRecord& b) {
  if (a.year != b.year || a.flood != b.flood || a.annual_mm != b.annual_mm ||
      a.annual_mismatch != b.annual_mismatch ||
      a.monthly_mm.size() != b.monthly_mm.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.monthly_mm.size(); ++i) {
    const double x = a.monthly_mm[i];
    const double y = b.monthly_mm[i];
    if (!(x == y || (is_missing(x) && is_missing(y)))) return false;
  }
  return true;
}

inline bool operator==(const Dataset& a, const Dataset& b) {
  return a.feature_names == b.feature_names && a.records == b.records;
}

// Encodes a descriptive flood label. YES/NO style words map directly;
// numeric values are binarized by a nonzero test.
inline std::optional<int> encode_flood_label(std::string_view text,
                                             bool* was_numeric = nullptr) {
  const std::string t = detail::upper(detail::trim(text));
  if (was_numeric) *was_numeric = false;
  if (t == "YES" || t == "Y" || t == "TRUE" || t == "FLOOD") return 1;
  if (t == "NO" || t == "N" || t == "FALSE" || t == "NO FLOOD") return 0;
  if (auto v = detail::parse_number(t)) {
    if (was_numeric) *was_numeric = true;
    return *v != 0.0 ? 1 : 0;
  }
  return std::nullopt;
}

inline std::string decode_flood_label(int flood) {
  if (flood != 0 && flood != 1) {
    throw ValidationError("flood label must be 0 or 1, got " +
                          std::to_string(flood));
  }
  return flood == 1 ? "YES" : "NO";
}

// Parses a rainfall table. Rows keep file order. Non-numeric or negative
// rainfall cells become missing; warnings (if non-null) collects notes about
// such cells, empty inputs and label binarization.
inline Dataset read_csv(std::istream& in, const CsvSchema& schema = {},
                        std::vector<std::string>* warnings = nullptr) {
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    header = detail::split_csv_line(line);
    break;
  }
  if (header.empty()) throw SchemaError("input has no header row");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
    header[0].erase(0, 3);
  }

  auto find_column = [&](const std::string& name) -> std::optional<std::size_t> {
    const std::string want = detail::upper(detail::trim(name));
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (detail::upper(detail::trim(header[i])) == want) return i;
    }
    return std::nullopt;
  };
  auto require_column = [&](const std::string& name) {
    auto idx = find_column(name);
    if (!idx) throw SchemaError("missing required column '" + name + "'");
    return *idx;
  };

  const std::size_t year_col = require_column(schema.year_column);
  std::vector<std::size_t> feature_cols;
  for (const auto& name : schema.feature_columns) {
    feature_cols.push_back(require_column(name));
  }
  const std::size_t label_col = require_column(schema.label_column);
  std::optional<std::size_t> annual_col;
  if (!schema.annual_prefix.empty()) {
    const std::string prefix = detail::upper(schema.annual_prefix);
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (detail::upper(detail::trim(header[i])).rfind(prefix, 0) == 0) {
        annual_col = i;
        break;
      }
    }
  }

  Dataset dataset;
  for (const auto& name : schema.feature_columns) {
    dataset.feature_names.push_back(detail::upper(detail::trim(name)));
  }

  std::set<int> seen_years;
  bool numeric_labels = false;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    ++row_no;
    const auto fields = detail::split_csv_line(line);
    const std::string where =
        "row " + std::to_string(row_no) + " (line " + std::to_string(line_no) + ")";
    auto field = [&](std::size_t col) -> std::string {
      if (col >= fields.size()) {
        throw ValidationError(where + ": expected at least " +
                              std::to_string(col + 1) + " fields, found " +
                              std::to_string(fields.size()));
      }
      return fields[col];
    };

    RainfallRecord record;
    const auto year = detail::parse_number(field(year_col));
    if (!year || *year != std::floor(*year)) {
      throw ValidationError(where + ": unparseable year '" +
                            detail::trim(field(year_col)) + "'");
    }
    record.year = static_cast<int>(*year);
    if (!seen_years.insert(record.year).second) {
      throw ValidationError(where + ": duplicate year " +
                            std::to_string(record.year));
    }

    record.monthly_mm.reserve(feature_cols.size());
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      const std::string raw = field(feature_cols[j]);
      auto v = detail::parse_number(raw);
      if (!v) {
        if (!detail::trim(raw).empty()) {
          warn(where + ": non-numeric " + dataset.feature_names[j] + " value '" +
               detail::trim(raw) + "' treated as missing");
        }
        record.monthly_mm.push_back(kMissing);
      } else if (*v < 0.0) {
        warn(where + ": negative " + dataset.feature_names[j] +
             " value treated as missing");
        record.monthly_mm.push_back(kMissing);
      } else {
        record.monthly_mm.push_back(*v);
      }
    }

    if (annual_col && *annual_col < fields.size()) {
      record.annual_mm = detail::parse_number(fields[*annual_col]);
    }

    bool numeric = false;
    const std::string raw_label = field(label_col);
    const auto label = encode_flood_label(raw_label, &numeric);
    if (!label) {
      throw ValidationError(where + ": unparseable flood label '" +
                            detail::trim(raw_label) + "'");
    }
    numeric_labels = numeric_labels || numeric;
    record.flood = *label;
    detail::flag_annual(record);
    if (record.annual_mismatch) {
      warn(where + ": annual total disagrees with monthly sum by more than 1 mm");
    }
    dataset.records.push_back(std::move(record));
  }

  if (numeric_labels) {
    warn("numeric flood labels binarized by nonzero test (nonzero -> 1)");
  }
  if (dataset.empty()) warn("input contains a header but no data rows");
  return dataset;
}

inline Dataset load_csv(const std::string& path, const CsvSchema& schema = {},
                        std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return read_csv(in, schema, warnings);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

enum class ImputeStrategy { kColumnMean, kZero };

inline std::string to_string(ImputeStrategy s) {
  return s == ImputeStrategy::kColumnMean ? "column-mean" : "zero";
}

inline ImputeStrategy parse_impute_strategy(std::string_view name) {
  if (name == "column-mean" || name == "mean") return ImputeStrategy::kColumnMean;
  if (name == "zero") return ImputeStrategy::kZero;
  throw ValidationError("unknown imputation strategy '" + std::string(name) + "'");
}

struct ImputedCell {
  int year = 0;
  std::string feature;
  double value = 0.0;
  ImputeStrategy strategy = ImputeStrategy::kColumnMean;
};

struct ImputeResult {
  Dataset dataset;
  std::vector<ImputedCell> log;
};

inline ImputeResult impute_missing(const Dataset& dataset,
                                   ImputeStrategy strategy = ImputeStrategy::kColumnMean) {
  const std::size_t m = dataset.num_features();
  FeatureVector fill(m, 0.0);
  if (strategy == ImputeStrategy::kColumnMean) {
    for (std::size_t j = 0; j < m; ++j) {
      double sum = 0.0;
      std::size_t count = 0;
      bool any_missing = false;
      for (const auto& r : dataset.records) {
        if (is_missing(r.monthly_mm[j])) {
          any_missing = true;
        } else {
          sum += r.monthly_mm[j];
          ++count;
        }
      }
      if (any_missing && count == 0) {
        throw ValidationError("column " + dataset.feature_names[j] +
                              " has no values; column-mean imputation undefined");
      }
      fill[j] = count > 0 ? sum / static_cast<double>(count) : 0.0;
    }
  }

  ImputeResult result{dataset, {}};
  for (auto& r : result.dataset.records) {
    bool touched = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (is_missing(r.monthly_mm[j])) {
        r.monthly_mm[j] = fill[j];
        result.log.push_back({r.year, dataset.feature_names[j], fill[j], strategy});
        touched = true;
      }
    }
    if (touched) detail::flag_annual(r);
  }
  return result;
}

// One line per imputed cell: year,month,imputed_value,strategy
inline std::string format_provenance(std::span<const ImputedCell> log) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& cell : log) {
    out << cell.year << ',' << cell.feature << ',' << cell.value << ','
        << to_string(cell.strategy) << '\n';
  }
  return out.str();
}

struct SplitDataset {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  double train_fraction = 0.0;
};

// Shuffles row indices with the seed and cuts at floor(fraction * N). Both
// partitions keep the input row order.
inline SplitDataset split(const Dataset& dataset, double train_fraction,
                          std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie in (0, 1)");
  }
  if (dataset.empty()) throw ValidationError("cannot split an empty dataset");
  const std::size_t n = dataset.size();
  const auto n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw ValidationError("train fraction " + std::to_string(train_fraction) +
                          " leaves an empty partition for " + std::to_string(n) +
                          " records");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  shuffle_in_place(order, rng);
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
  std::vector<std::size_t> test_idx(order.begin() + n_train, order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {dataset.subset(train_idx), dataset.subset(test_idx), seed, train_fraction};
}

// Per-feature standardization fitted on training rows.
struct Scaler {
  FeatureVector mean;
  FeatureVector stddev;

  std::size_t size() const { return mean.size(); }

  FeatureVector apply(FeatureView x) const {
    if (x.size() != mean.size()) {
      throw ValidationError("scaler expects " + std::to_string(mean.size()) +
                            " features, got " + std::to_string(x.size()));
    }
    FeatureVector out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      out[j] = (x[j] - mean[j]) / stddev[j];
    }
    return out;
  }

  void apply_into(FeatureView x, std::span<double> out) const {
    for (std::size_t j = 0; j < x.size(); ++j) {
      out[j] = (x[j] - mean[j]) / stddev[j];
    }
  }

  Dataset apply(const Dataset& dataset) const {
    Dataset out = dataset;
    for (auto& r : out.records) r.monthly_mm = apply(r.monthly_mm);
    return out;
  }
};

inline Scaler fit_scaler(std::span<const FeatureVector> rows) {
  if (rows.empty()) throw ValidationError("cannot fit a scaler on zero rows");
  const std::size_t m = rows.front().size();
  Scaler s{FeatureVector(m, 0.0), FeatureVector(m, 0.0)};
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < m; ++j) s.mean[j] += r[j];
  }
  for (auto& v : s.mean) v /= n;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = r[j] - s.mean[j];
      s.stddev[j] += d * d;
    }
  }
  for (auto& v : s.stddev) {
    v = std::sqrt(v / n);
    if (v == 0.0) v = 1.0;
  }
  return s;
}

inline Scaler fit_scaler(const Dataset& train) {
  const auto rows = train.rows();
  return fit_scaler(std::span<const FeatureVector>(rows));
}

inline Dataset apply_scaler(const Scaler& scaler, const Dataset& dataset) {
  return scaler.apply(dataset);
}

inline FeatureVector monthly_means(const Dataset& dataset) {
  if (dataset.empty()) throw ValidationError("monthly means of an empty dataset");
  FeatureVector means(dataset.num_features(), 0.0);
  for (const auto& r : dataset.records) {
    for (std::size_t j = 0; j < means.size(); ++j) means[j] += r.monthly_mm[j];
  }
  for (auto& v : means) v /= static_cast<double>(dataset.size());
  return means;
}

}  // namespace floodxai

#endif  // FLOODXAI_DATASET_HPP_
