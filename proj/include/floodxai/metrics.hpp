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

#ifndef FLOODXAI_METRICS_HPP_
#define FLOODXAI_METRICS_HPP_

#include <algorithm>
#include <cstddef>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "floodxai/dataset.hpp"
#include "floodxai/models.hpp"

namespace floodxai {

// Positive class is flood = 1.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// A ratio whose denominator is zero is left empty instead of being coerced
// to 0 or 1.
struct Scores {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

struct MetricsReport {
  std::string model_name;
  std::string partition = "test";
  ConfusionMatrix matrix;
  Scores scores;
};

inline ConfusionMatrix confusion(std::span<const int> predictions,
                                 std::span<const int> truth) {
  if (predictions.size() != truth.size()) {
    throw ValidationError("confusion: " + std::to_string(predictions.size()) +
                          " predictions for " + std::to_string(truth.size()) +
                          " labels");
  }
  if (predictions.empty()) throw ValidationError("confusion: no labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predictions[i];
    const int t = truth[i];
    if ((p != 0 && p != 1) || (t != 0 && t != 1)) {
      throw ValidationError("confusion: label outside {0, 1} at position " +
                            std::to_string(i));
    }
    if (p == 1 && t == 1) ++cm.tp;
    else if (p == 1) ++cm.fp;
    else if (t == 1) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

inline Scores score(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ValidationError("score: empty confusion matrix");
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  Scores s;
  s.accuracy = ratio(cm.tp + cm.tn, cm.total());
  s.precision = ratio(cm.tp, cm.tp + cm.fp);
  s.recall = ratio(cm.tp, cm.tp + cm.fn);
  if (s.precision && s.recall && *s.precision + *s.recall > 0.0) {
    s.f1 = 2.0 * *s.precision * *s.recall / (*s.precision + *s.recall);
  }
  return s;
}

template <ProbabilityModel M>
MetricsReport evaluate(const M& model, const Dataset& data, std::string model_name = {},
                       std::string partition = "test") {
  if (data.empty()) throw ValidationError("evaluate: empty dataset");
  std::vector<int> predictions;
  predictions.reserve(data.size());
  for (const auto& r : data.records) predictions.push_back(predict_class(model, r.monthly_mm));
  MetricsReport report;
  report.model_name = std::move(model_name);
  report.partition = std::move(partition);
  report.matrix = confusion(predictions, data.labels());
  report.scores = score(report.matrix);
  return report;
}

inline std::string format_score(const std::optional<double>& v, int precision = 4) {
  if (!v) return "n/a";
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << *v;
  return out.str();
}

// Aligned text table in the column order Model, Accuracy, Precision, Recall,
// F1-score.
inline std::string format_metrics_table(std::span<const MetricsReport> reports) {
  std::size_t name_width = 5;
  for (const auto& r : reports) {
    std::string label = r.model_name;
    if (r.partition != "test") label += " [" + r.partition + "]";
    name_width = std::max(name_width, label.size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(name_width)) << "Model" << std::right
      << std::setw(10) << "Accuracy" << std::setw(11) << "Precision" << std::setw(8)
      << "Recall" << std::setw(10) << "F1-score" << '\n';
  for (const auto& r : reports) {
    std::string label = r.model_name;
    if (r.partition != "test") label += " [" + r.partition + "]";
    out << std::left << std::setw(static_cast<int>(name_width)) << label << std::right
        << std::setw(10) << format_score(r.scores.accuracy) << std::setw(11)
        << format_score(r.scores.precision) << std::setw(8)
        << format_score(r.scores.recall) << std::setw(10) << format_score(r.scores.f1)
        << '\n';
  }
  return out.str();
}

}  // namespace floodxai

#endif  // FLOODXAI_METRICS_HPP_
