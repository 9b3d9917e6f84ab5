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

#include "floodxai/metrics.hpp"

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace floodxai {
namespace {

TEST(Confusion, AllPositiveAgreement) {
  const std::vector<int> ones(7, 1);
  const ConfusionMatrix cm = confusion(ones, ones);
  EXPECT_EQ(cm, (ConfusionMatrix{7, 0, 0, 0}));
}

TEST(Confusion, HandCountedCase) {
  const ConfusionMatrix cm = confusion(std::vector<int>{1, 0, 1, 1}, std::vector<int>{1, 1, 0, 1});
  EXPECT_EQ(cm.tp, 2u);
  EXPECT_EQ(cm.fn, 1u);
  EXPECT_EQ(cm.fp, 1u);
  EXPECT_EQ(cm.tn, 0u);
}

TEST(Confusion, Errors) {
  EXPECT_THROW(confusion(std::vector<int>{}, std::vector<int>{}), ValidationError);
  EXPECT_THROW(confusion(std::vector<int>{1}, std::vector<int>{1, 0}), ValidationError);
  EXPECT_THROW(confusion(std::vector<int>{2}, std::vector<int>{1}), ValidationError);
}

TEST(Score, LogisticRowOfTheComparisonTable) {
  const Scores s = score({10, 0, 26, 1});
  EXPECT_DOUBLE_EQ(*s.precision, 1.0);
  EXPECT_NEAR(*s.recall, 0.9091, 5e-5);
  EXPECT_NEAR(*s.f1, 0.9524, 5e-5);
  EXPECT_NEAR(*s.accuracy, 0.973, 5e-4);
}

TEST(Score, SymmetricCounts) {
  const Scores s = score({3, 3, 3, 3});
  EXPECT_DOUBLE_EQ(*s.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(*s.precision, 0.5);
  EXPECT_DOUBLE_EQ(*s.recall, 0.5);
  EXPECT_DOUBLE_EQ(*s.f1, 0.5);
}

TEST(Score, ZeroDenominatorIsFlaggedNotCoerced) {
  const Scores s = score({0, 0, 5, 5});
  EXPECT_EQ(*s.recall, 0.0);
  EXPECT_FALSE(s.precision.has_value());
  EXPECT_FALSE(s.f1.has_value());
  EXPECT_THROW(score({}), ValidationError);
}

TEST(Score, RandomLabelsMatchNaiveCounting) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 60);
    std::vector<int> p(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<int>(uniform_index(rng, 2));
      t[i] = static_cast<int>(uniform_index(rng, 2));
    }
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      tp += p[i] == 1 && t[i] == 1;
      fp += p[i] == 1 && t[i] == 0;
      tn += p[i] == 0 && t[i] == 0;
      fn += p[i] == 0 && t[i] == 1;
    }
    const Scores s = score(confusion(p, t));
    ASSERT_EQ(*s.accuracy, (tp + tn) / static_cast<double>(n));
    if (tp + fp > 0) {
      ASSERT_EQ(*s.precision, tp / (tp + fp));
    } else {
      ASSERT_FALSE(s.precision);
    }
    if (tp + fn > 0) {
      ASSERT_EQ(*s.recall, tp / (tp + fn));
    } else {
      ASSERT_FALSE(s.recall);
    }
    if (s.f1) {
      ASSERT_GE(*s.f1, std::min(*s.precision, *s.recall) - 1e-15);
      ASSERT_LE(*s.f1, std::max(*s.precision, *s.recall) + 1e-15);
    }
    // Swapping the positive class swaps tp/tn and fp/fn and keeps accuracy.
    std::vector<int> pn(n), tneg(n);
    for (std::size_t i = 0; i < n; ++i) {
      pn[i] = 1 - p[i];
      tneg[i] = 1 - t[i];
    }
    const ConfusionMatrix swapped = confusion(pn, tneg);
    const ConfusionMatrix cm = confusion(p, t);
    ASSERT_EQ(swapped.tp, cm.tn);
    ASSERT_EQ(swapped.fp, cm.fn);
    ASSERT_EQ(*score(swapped).accuracy, *s.accuracy);
  }
}

TEST(Evaluate, SeparableToyScoresPerfectly) {
  Dataset d;
  d.feature_names = {"X"};
  for (int i = 0; i < 10; ++i) {
    d.records.push_back({i, {i < 5 ? -1.0 - i : 1.0 + i}, std::nullopt, i < 5 ? 0 : 1, false});
  }
  const LogisticModel m = train_logistic(d);
  const MetricsReport r = evaluate(m, d, "Logistic Regression", "train");
  EXPECT_EQ(*r.scores.accuracy, 1.0);
  EXPECT_EQ(r.partition, "train");
}

TEST(Evaluate, ConstantHalfModelPredictsFloodEverywhere) {
  const Dataset d = testing::synthetic_rainfall(40, 3);
  const auto half = FunctionModel{[](FeatureView) { return 0.5; }};
  const MetricsReport r = evaluate(half, d, "half");
  double floods = 0;
  for (const auto& rec : d.records) floods += rec.flood;
  EXPECT_DOUBLE_EQ(*r.scores.accuracy, floods / static_cast<double>(d.size()));
  EXPECT_EQ(r.matrix.tn + r.matrix.fn, 0u);
}

TEST(Evaluate, WidthMismatchIsAnError) {
  const Dataset d = testing::synthetic_rainfall(20, 3);
  const LogisticModel m{FeatureVector(11, 0.0), 0.0, {}};
  EXPECT_THROW(evaluate(m, d), ValidationError);
}

TEST(MetricsTable, ColumnOrderAndUndefinedCells) {
  std::vector<MetricsReport> reports(2);
  reports[0].model_name = "Logistic Regression";
  reports[0].scores = score({10, 0, 26, 1});
  reports[1].model_name = "KNN";
  reports[1].partition = "train";
  reports[1].scores = score({0, 0, 5, 5});
  const std::string table = format_metrics_table(reports);
  EXPECT_EQ(table.rfind("Model", 0), 0u);
  EXPECT_LT(table.find("Accuracy"), table.find("Precision"));
  EXPECT_LT(table.find("Precision"), table.find("Recall"));
  EXPECT_LT(table.find("Recall"), table.find("F1-score"));
  EXPECT_NE(table.find("KNN [train]"), std::string::npos);
  EXPECT_NE(table.find("n/a"), std::string::npos);
}

}  // namespace
}  // namespace floodxai
