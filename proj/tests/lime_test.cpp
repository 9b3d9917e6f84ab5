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

#include "floodxai/lime.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

namespace floodxai {
namespace {

Dataset one_column(const std::vector<double>& values) {
  Dataset d;
  d.feature_names = {"AUG"};
  for (std::size_t i = 0; i < values.size(); ++i) {
    d.records.push_back({static_cast<int>(1901 + i), {values[i]}, std::nullopt,
                         static_cast<int>(i % 2), false});
  }
  return d;
}

// Black box that is an exact linear function of the interpretable bits of
// one instance: intercept + sum of coef[j] over features still in their bin.
struct BitLinearModel {
  const Discretizer* disc;
  std::vector<std::size_t> home;
  FeatureVector coef;
  double intercept;

  double predict_proba(FeatureView x) const {
    double y = intercept;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (disc->bin_of(j, x[j]) == home[j]) y += coef[j];
    }
    return y;
  }
};

TEST(Quantile, LinearInterpolationOfOneToHundred) {
  FeatureVector v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.25), 25.75);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 50.5);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.75), 75.25);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 1.0), 100.0);
}

TEST(Discretizer, QuartileThresholdsAndConditions) {
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  const Discretizer d = fit_discretizer(one_column(v));
  ASSERT_EQ(d.thresholds[0], (FeatureVector{25.75, 50.5, 75.25}));
  EXPECT_FALSE(d.degenerate[0]);
  EXPECT_EQ(d.bin_of(0, 25.75), 0u);
  EXPECT_EQ(d.bin_of(0, 25.76), 1u);
  EXPECT_EQ(d.bin_of(0, 100.0), 3u);
  EXPECT_EQ(d.condition(0, 0), "AUG <= 25.75");
  EXPECT_EQ(d.condition(0, 1), "25.75 < AUG <= 50.50");
  EXPECT_EQ(d.condition(0, 3), "AUG > 75.25");
  std::size_t total = 0;
  for (const auto& b : d.bins[0]) total += b.count;
  EXPECT_EQ(total, 100u);
}

TEST(Discretizer, ConstantFeatureIsFlaggedDegenerate) {
  const Discretizer d = fit_discretizer(one_column(std::vector<double>(30, 12.5)));
  EXPECT_TRUE(d.degenerate[0]);
  EXPECT_EQ(d.num_bins(0), 1u);
  EXPECT_EQ(d.condition(0, 0), "AUG (constant)");
}

TEST(Perturb, AnchorDeterminismAndBinMembership) {
  const Dataset train = testing::synthetic_rainfall(118, 4);
  const Discretizer disc = fit_discretizer(train);
  LimeConfig config;
  config.n_perturbations = 500;
  const FeatureVector& x = train.records[7].monthly_mm;
  const auto a = perturb(x, disc, config);
  const auto b = perturb(x, disc, config);
  ASSERT_EQ(a.size(), 500u);
  EXPECT_EQ(a[0].x, x);
  EXPECT_EQ(a[0].bits, std::vector<std::uint8_t>(12, 1));
  std::size_t kept = 0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    ASSERT_EQ(a[s].x, b[s].x);
    ASSERT_EQ(a[s].bits, b[s].bits);
    for (std::size_t j = 0; j < 12; ++j) {
      const bool home = disc.bin_of(j, a[s].x[j]) == disc.bin_of(j, x[j]);
      // Bit 1 exactly when the feature is still in the instance's bin.
      ASSERT_EQ(a[s].bits[j] == 1, home) << "sample " << s << " feature " << j;
      if (a[s].bits[j]) {
        ASSERT_EQ(a[s].x[j], x[j]);
      } else {
        const auto bin = disc.bin_of(j, a[s].x[j]);
        ASSERT_GE(a[s].x[j], disc.bins[j][bin].min);
        ASSERT_LE(a[s].x[j], disc.bins[j][bin].max);
      }
      kept += a[s].bits[j];
    }
  }
  // Keep probability one half.
  const double rate = static_cast<double>(kept - 12) / (499.0 * 12.0);
  EXPECT_NEAR(rate, 0.5, 0.03);

  config.seed = 43;
  EXPECT_NE(perturb(x, disc, config)[1].x, a[1].x);
}

TEST(Perturb, NormalSamplingStaysInsideTheBinRange) {
  const Dataset train = testing::synthetic_rainfall(118, 5);
  const Discretizer disc = fit_discretizer(train);
  LimeConfig config;
  config.n_perturbations = 300;
  config.sampling = BinSampling::kNormal;
  const FeatureVector& x = train.records[0].monthly_mm;
  for (const auto& s : perturb(x, disc, config)) {
    for (std::size_t j = 0; j < 12; ++j) {
      ASSERT_EQ(s.bits[j] == 1, disc.bin_of(j, s.x[j]) == disc.bin_of(j, x[j]));
    }
  }
}

TEST(Proximity, WeightIsOneAtTheInstanceAndFallsWithDistance) {
  const Dataset train = testing::synthetic_rainfall(80, 6);
  const Scaler scaler = fit_scaler(train);
  const FeatureVector x = train.records[3].monthly_mm;
  std::vector<PerturbedSample> samples;
  for (double step : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    FeatureVector y = x;
    for (std::size_t j = 0; j < y.size(); ++j) y[j] += step * scaler.stddev[j];
    samples.push_back({y, {}});
  }
  const FeatureVector w = proximity_weights(samples, x, scaler, 2.0);
  EXPECT_DOUBLE_EQ(w[0], 1.0);
  for (std::size_t i = 1; i < w.size(); ++i) {
    EXPECT_LT(w[i], w[i - 1]);
    const double d2 = 12.0 * std::pow(std::vector<double>{0, 0.5, 1, 2, 4}[i], 2);
    EXPECT_NEAR(w[i], std::exp(-d2 / 4.0), 1e-12);
  }
}

class BitLinear : public ::testing::Test {
 protected:
  void SetUp() override {
    train = testing::synthetic_rainfall(118, 11);
    ctx = LimeContext::fit(train, config);
    instance = train.records[20].monthly_mm;
    for (std::size_t j = 0; j < 12; ++j) home.push_back(ctx.discretizer.bin_of(j, instance[j]));
  }

  Dataset train;
  LimeConfig config;
  LimeContext ctx;
  FeatureVector instance;
  std::vector<std::size_t> home;
};

TEST_F(BitLinear, SurrogateRecoversTheCoefficients) {
  FeatureVector coef(12, 0.0);
  coef[6] = 0.35;   // JUL
  coef[7] = 0.2;    // AUG
  coef[4] = -0.15;  // MAY
  coef[0] = 0.05;   // JAN
  const BitLinearModel model{&ctx.discretizer, home, coef, 0.1};
  const LimeExplanation e = explain_local(model, instance, ctx, config);
  EXPECT_GE(e.local_fidelity, 0.999);
  EXPECT_NEAR(e.intercept, 0.1, 1e-3);
  ASSERT_EQ(e.conditions.size(), 6u);
  for (const auto& c : e.conditions) EXPECT_NEAR(c.weight, coef[c.feature], 1e-3) << c.name;
  EXPECT_EQ(e.conditions[0].name, "JUL");
  EXPECT_EQ(e.conditions[1].name, "AUG");
  EXPECT_EQ(e.conditions[2].name, "MAY");
  EXPECT_LT(e.conditions[2].weight, 0.0);
  EXPECT_NEAR(e.surrogate_prediction, model.predict_proba(instance), 1e-3);
}

TEST_F(BitLinear, IdenticalSeedsGiveIdenticalExplanations) {
  FeatureVector coef(12, 0.0);
  coef[5] = 0.3;
  const BitLinearModel model{&ctx.discretizer, home, coef, 0.2};
  const auto a = explain_local(model, instance, ctx, config);
  const auto b = explain_local(model, instance, ctx, config);
  EXPECT_EQ(a.intercept, b.intercept);
  ASSERT_EQ(a.conditions.size(), b.conditions.size());
  for (std::size_t i = 0; i < a.conditions.size(); ++i) {
    EXPECT_EQ(a.conditions[i].name, b.conditions[i].name);
    EXPECT_EQ(a.conditions[i].weight, b.conditions[i].weight);
  }
  EXPECT_EQ(a.local_fidelity, b.local_fidelity);
}

TEST_F(BitLinear, SelectionIsCappedAndFindsTheSupport) {
  FeatureVector coef(12, 0.0);
  coef[2] = 0.4;
  coef[9] = -0.3;
  const BitLinearModel model{&ctx.discretizer, home, coef, 0.3};
  config.n_selected_features = 2;
  config.n_perturbations = 500;
  const auto e = explain_local(model, instance, ctx, config);
  ASSERT_EQ(e.conditions.size(), 2u);
  EXPECT_EQ(e.conditions[0].name, "MAR");
  EXPECT_EQ(e.conditions[1].name, "OCT");
  EXPECT_GT(e.conditions[0].weight, 0.0);
  EXPECT_LT(e.conditions[1].weight, 0.0);
}

TEST_F(BitLinear, ConstantModelGivesZeroWeights) {
  const auto model = FunctionModel{[](FeatureView) { return 0.37; }};
  const auto e = explain_local(model, instance, ctx, config);
  EXPECT_NEAR(e.intercept, 0.37, 1e-12);
  for (const auto& c : e.conditions) EXPECT_NEAR(c.weight, 0.0, 1e-12);
  EXPECT_EQ(e.local_fidelity, 1.0);
  EXPECT_EQ(e.predicted_class, 0);
}

TEST_F(BitLinear, WideKernelMatchesUnweightedLeastSquares) {
  FeatureVector coef(12, 0.0);
  coef[6] = 0.3;
  coef[1] = 0.1;
  // Nonlinear in the bits so the fit is not exact.
  const BitLinearModel linear{&ctx.discretizer, home, coef, 0.0};
  const auto model = FunctionModel{[&](FeatureView x) {
    const double y = linear.predict_proba(x);
    return y * y + 0.05 * std::sin(x[3]);
  }};
  config.n_perturbations = 400;
  config.n_selected_features = 12;
  config.kernel_width = 1e9;
  config.ridge = 0.0;
  const auto samples = perturb(instance, ctx.discretizer, config);
  const FeatureVector w = proximity_weights(samples, instance, ctx.scaler, 1e9);
  for (double wi : w) ASSERT_NEAR(wi, 1.0, 1e-12);

  const auto e = fit_local_surrogate(model, std::span<const PerturbedSample>(samples), ctx, config);
  Eigen::MatrixXd a(samples.size(), 13);
  Eigen::VectorXd y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    a(i, 0) = 1.0;
    for (std::size_t j = 0; j < 12; ++j) a(i, j + 1) = samples[i].bits[j];
    y(i) = model.predict_proba(samples[i].x);
  }
  const Eigen::VectorXd ols = a.colPivHouseholderQr().solve(y);
  EXPECT_NEAR(e.intercept, ols(0), 1e-9);
  ASSERT_EQ(e.conditions.size(), 12u);
  for (const auto& c : e.conditions) EXPECT_NEAR(c.weight, ols(c.feature + 1), 1e-9) << c.name;
}

TEST(LimeConfig, Validation) {
  LimeConfig c;
  EXPECT_NO_THROW(c.validate(12));
  c.n_selected_features = 13;
  EXPECT_THROW(c.validate(12), ValidationError);
  c.n_selected_features = 6;
  c.n_perturbations = 59;
  EXPECT_THROW(c.validate(12), ValidationError);
  c.n_perturbations = 60;
  c.kernel_width = 0.0;
  EXPECT_THROW(c.validate(12), ValidationError);
  EXPECT_NEAR(LimeConfig{}.kernel_width_for(12), 0.75 * std::sqrt(12.0), 1e-15);
}

TEST(LimeSurrogate, IdenticalBitVectorsAreANumericalError) {
  const std::vector<std::vector<std::uint8_t>> bits(20, std::vector<std::uint8_t>(3, 1));
  const FeatureVector y(20, 0.5), w(20, 1.0);
  EXPECT_THROW(fit_weighted_surrogate(bits, y, w, 2, 1e-3), NumericalError);
}

TEST(LimeOnModels, ExplanationsAreWellFormedForEveryModelKind) {
  const Dataset train = testing::synthetic_rainfall(90, 21);
  LimeConfig config;
  config.n_perturbations = 600;
  const LimeContext ctx = LimeContext::fit(train, config);
  for (ModelKind kind : {ModelKind::kLogistic, ModelKind::kKnn, ModelKind::kTree, ModelKind::kSvm}) {
    const TrainedModel model = train_model(kind, train);
    const FeatureVector& x = train.records[5].monthly_mm;
    const auto e = explain_local(model, x, ctx, config);
    EXPECT_EQ(e.predicted_class, predict_class(model, x)) << to_string(kind);
    EXPECT_LE(e.conditions.size(), 6u);
    EXPECT_LE(e.local_fidelity, 1.0 + 1e-12);
    for (std::size_t i = 1; i < e.conditions.size(); ++i) {
      EXPECT_GE(std::abs(e.conditions[i - 1].weight), std::abs(e.conditions[i].weight));
    }
    for (const auto& c : e.conditions) {
      EXPECT_EQ(c.value, x[c.feature]);
      if (c.lower) {
        EXPECT_GT(c.value, *c.lower);
      }
      if (c.upper) {
        EXPECT_LE(c.value, *c.upper);
      }
    }
  }
}

GlobalImportance ranked(const std::vector<std::string>& order) {
  GlobalImportance g;
  g.feature_names = order;
  for (std::size_t i = 0; i < order.size(); ++i) {
    g.ranking.push_back(i);
    g.importance.push_back(static_cast<double>(order.size() - i));
  }
  return g;
}

LimeExplanation lime_naming(const std::vector<std::pair<std::string, double>>& named) {
  LimeExplanation e;
  for (std::size_t i = 0; i < named.size(); ++i) {
    LimeCondition c;
    c.feature = i;
    c.name = named[i].first;
    c.weight = named[i].second;
    e.conditions.push_back(c);
  }
  return e;
}

TEST(Compare, IdenticalSetsOverlapFully) {
  const auto g = ranked({"JUL", "MAY", "JUN", "SEP", "AUG", "JAN"});
  const auto e = lime_naming({{"AUG", 0.2}, {"JUL", 0.1}, {"SEP", 0.1}, {"MAY", -0.1}, {"JUN", 0.3}});
  const AgreementReport r = compare_explanations(g, e, 5);
  EXPECT_EQ(r.overlap, 1.0);
  EXPECT_EQ(r.shared.size(), 5u);
  EXPECT_FALSE(r.sign_agreement_rate.has_value());
}

TEST(Compare, DisjointSetsHaveZeroOverlap) {
  const auto g = ranked({"JUL", "MAY", "JUN", "SEP", "AUG", "JAN", "FEB"});
  const auto e = lime_naming({{"JAN", 0.2}, {"FEB", -0.1}});
  EXPECT_EQ(compare_explanations(g, e, 5).overlap, 0.0);
}

TEST(Compare, PartialOverlapUsesTheSmallerSetAndChecksSigns) {
  const auto g = ranked({"A", "B", "C", "D"});
  auto e = lime_naming({{"B", 0.5}, {"D", -0.2}});
  e.conditions[0].feature = 1;
  e.conditions[1].feature = 3;
  ShapExplanation local;
  local.phi = {0.0, 0.3, 0.0, 0.1};
  const AgreementReport r = compare_explanations(g, e, 2, &local);
  EXPECT_EQ(r.shap_top, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(r.overlap, 0.5);
  ASSERT_EQ(r.signs.size(), 2u);
  EXPECT_TRUE(r.signs[0].agree);
  EXPECT_FALSE(r.signs[1].agree);
  EXPECT_EQ(*r.sign_agreement_rate, 0.5);
}

}  // namespace
}  // namespace floodxai
