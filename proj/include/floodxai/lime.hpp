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

#ifndef FLOODXAI_LIME_HPP_
#define FLOODXAI_LIME_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "floodxai/common.hpp"
#include "floodxai/dataset.hpp"
#include "floodxai/models.hpp"
#include "floodxai/shap.hpp"

namespace floodxai {

enum class BinSampling { kUniform, kNormal };

struct LimeConfig {
  std::size_t n_perturbations = 2000;
  // Proximity kernel width in standardized units; empty means 0.75 * sqrt(M).
  std::optional<double> kernel_width;
  std::size_t n_selected_features = 6;
  std::size_t n_bins = 4;
  std::uint64_t seed = 42;
  BinSampling sampling = BinSampling::kUniform;
  double ridge = 1e-3;

  double kernel_width_for(std::size_t m) const {
    return kernel_width ? *kernel_width : 0.75 * std::sqrt(static_cast<double>(m));
  }

  void validate(std::size_t m) const {
    if (n_selected_features == 0 || n_selected_features > m) {
      throw ValidationError("LIME: selected feature count must lie in [1, " +
                            std::to_string(m) + "]");
    }
    if (n_perturbations < 10 * n_selected_features) {
      throw ValidationError("LIME: need at least " + std::to_string(10 * n_selected_features) +
                            " perturbations for " + std::to_string(n_selected_features) +
                            " selected features");
    }
    if (kernel_width && !(*kernel_width > 0.0)) {
      throw ValidationError("LIME: kernel width must be positive");
    }
    if (n_bins < 2) throw ValidationError("LIME: need at least 2 bins");
    if (ridge < 0.0) throw ValidationError("LIME: ridge penalty must be non-negative");
  }
};

// Linear-interpolation quantile of already sorted values (p in [0, 1]).
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ValidationError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct BinStats {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

// Quantile bins per feature. A value v falls in bin b = #{thresholds < v}, so
// bin 0 is "x <= t0" and the top bin is "x > t_last".
struct Discretizer {
  std::vector<std::string> feature_names;
  std::vector<FeatureVector> thresholds;
  std::vector<std::vector<BinStats>> bins;
  std::vector<bool> degenerate;  // constant in training: a single bin

  std::size_t num_features() const { return thresholds.size(); }
  std::size_t num_bins(std::size_t j) const { return thresholds[j].size() + 1; }

  std::size_t bin_of(std::size_t j, double v) const {
    const auto& t = thresholds[j];
    return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), v) - t.begin());
  }

  std::optional<double> lower_bound_of(std::size_t j, std::size_t bin) const {
    if (bin == 0) return std::nullopt;
    return thresholds[j][bin - 1];
  }
  std::optional<double> upper_bound_of(std::size_t j, std::size_t bin) const {
    if (bin >= thresholds[j].size()) return std::nullopt;
    return thresholds[j][bin];
  }

  std::string condition(std::size_t j, std::size_t bin) const {
    auto fmt = [](double v) {
      std::ostringstream o;
      o << std::fixed << std::setprecision(2) << v;
      return o.str();
    };
    const auto& name = feature_names[j];
    const auto lo = lower_bound_of(j, bin);
    const auto hi = upper_bound_of(j, bin);
    if (!lo && !hi) return name + " (constant)";
    if (!lo) return name + " <= " + fmt(*hi);
    if (!hi) return name + " > " + fmt(*lo);
    return fmt(*lo) + " < " + name + " <= " + fmt(*hi);
  }
};

inline Discretizer fit_discretizer(const Dataset& train, std::size_t n_bins = 4) {
  if (train.empty()) throw ValidationError("fit_discretizer: empty training set");
  if (n_bins < 2) throw ValidationError("fit_discretizer: need at least 2 bins");
  const std::size_t m = train.num_features();
  Discretizer d;
  d.feature_names = train.feature_names;
  d.thresholds.resize(m);
  d.bins.resize(m);
  d.degenerate.assign(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    FeatureVector column;
    column.reserve(train.size());
    for (const auto& r : train.records) column.push_back(r.monthly_mm[j]);
    std::sort(column.begin(), column.end());
    for (std::size_t q = 1; q < n_bins; ++q) {
      const double t = quantile_sorted(column, static_cast<double>(q) / static_cast<double>(n_bins));
      // Cuts at or above the maximum would leave an empty top bin.
      if (t >= column.back()) continue;
      if (d.thresholds[j].empty() || t > d.thresholds[j].back()) d.thresholds[j].push_back(t);
    }
    d.degenerate[j] = d.thresholds[j].empty();

    std::vector<std::vector<double>> members(d.num_bins(j));
    for (double v : column) members[d.bin_of(j, v)].push_back(v);
    for (const auto& values : members) {
      BinStats s;
      s.count = values.size();
      if (!values.empty()) {
        s.min = values.front();
        s.max = values.back();
        for (double v : values) s.mean += v;
        s.mean /= static_cast<double>(values.size());
        for (double v : values) s.stddev += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(s.stddev / static_cast<double>(values.size()));
      }
      d.bins[j].push_back(s);
    }
  }
  return d;
}

struct PerturbedSample {
  FeatureVector x;
  // 1 where the feature stayed in the instance's bin.
  std::vector<std::uint8_t> bits;
};

// Sample 0 is the instance itself. Every other sample keeps each feature's
// value with probability 1/2 (bit 1); otherwise the feature is redrawn from a
// different non-empty bin, chosen uniformly, within that bin's training range.
inline std::vector<PerturbedSample> perturb(FeatureView instance, const Discretizer& disc,
                                            const LimeConfig& config) {
  const std::size_t m = disc.num_features();
  if (instance.size() != m) {
    throw ValidationError("perturb: instance has " + std::to_string(instance.size()) +
                          " features, discretizer " + std::to_string(m));
  }
  std::vector<std::size_t> home(m);
  std::vector<std::vector<std::size_t>> alternatives(m);
  for (std::size_t j = 0; j < m; ++j) {
    home[j] = disc.bin_of(j, instance[j]);
    for (std::size_t b = 0; b < disc.num_bins(j); ++b) {
      if (b != home[j] && disc.bins[j][b].count > 0) alternatives[j].push_back(b);
    }
  }

  Rng rng(config.seed);
  std::vector<PerturbedSample> samples;
  samples.reserve(config.n_perturbations);
  samples.push_back({FeatureVector(instance.begin(), instance.end()),
                     std::vector<std::uint8_t>(m, 1)});
  for (std::size_t s = 1; s < config.n_perturbations; ++s) {
    PerturbedSample p{FeatureVector(instance.begin(), instance.end()),
                      std::vector<std::uint8_t>(m, 1)};
    for (std::size_t j = 0; j < m; ++j) {
      const bool keep = uniform_unit(rng) < 0.5;
      if (keep || alternatives[j].empty()) continue;
      const std::size_t bin = alternatives[j][uniform_index(rng, alternatives[j].size())];
      const BinStats& st = disc.bins[j][bin];
      double v;
      if (config.sampling == BinSampling::kUniform) {
        v = st.min + uniform_unit(rng) * (st.max - st.min);
      } else {
        // Box-Muller, clamped to the bin's observed range.
        const double u1 = 1.0 - uniform_unit(rng);
        const double u2 = uniform_unit(rng);
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        v = std::clamp(st.mean + st.stddev * z, st.min, st.max);
      }
      p.x[j] = v;
      p.bits[j] = 0;
    }
    samples.push_back(std::move(p));
  }
  return samples;
}

// exp(-d^2 / width^2), d the Euclidean distance in standardized units.
inline FeatureVector proximity_weights(std::span<const PerturbedSample> samples,
                                       FeatureView instance, const Scaler& scaler,
                                       double kernel_width) {
  const FeatureVector origin = scaler.apply(instance);
  FeatureVector weights;
  weights.reserve(samples.size());
  FeatureVector z(origin.size());
  for (const auto& s : samples) {
    scaler.apply_into(s.x, z);
    const double d = euclidean_distance(origin, z);
    weights.push_back(std::exp(-(d * d) / (kernel_width * kernel_width)));
  }
  return weights;
}

struct LocalSurrogate {
  double intercept = 0.0;
  FeatureVector coefficients;  // zero outside `selected`
  std::vector<std::size_t> selected;
  double weighted_r2 = 0.0;
};

namespace detail {

struct RidgeFit {
  double intercept = 0.0;
  Eigen::VectorXd beta;
  double r2 = 0.0;
};

// Weighted ridge regression on the chosen bit columns; intercept unpenalized.
inline RidgeFit weighted_ridge(const std::vector<std::vector<std::uint8_t>>& bits,
                               FeatureView y, FeatureView w,
                               std::span<const std::size_t> columns, double ridge) {
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto k = static_cast<Eigen::Index>(columns.size());
  double wsum = 0.0;
  double ybar = 0.0;
  Eigen::VectorXd xbar = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    wsum += w[ii];
    ybar += w[ii] * y[ii];
    for (Eigen::Index c = 0; c < k; ++c) {
      xbar(c) += w[ii] * bits[ii][columns[static_cast<std::size_t>(c)]];
    }
  }
  ybar /= wsum;
  xbar /= wsum;

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd row(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    for (Eigen::Index c = 0; c < k; ++c) {
      row(c) = bits[ii][columns[static_cast<std::size_t>(c)]] - xbar(c);
    }
    gram.noalias() += w[ii] * row * row.transpose();
    rhs.noalias() += w[ii] * (y[ii] - ybar) * row;
  }
  gram.diagonal().array() += ridge;

  RidgeFit fit;
  if (k > 0) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw NumericalError("LIME surrogate: normal equations are not positive definite");
    }
    fit.beta = ldlt.solve(rhs);
    if (!fit.beta.allFinite()) {
      throw NumericalError("LIME surrogate: degenerate design matrix (non-finite solution)");
    }
  } else {
    fit.beta = Eigen::VectorXd::Zero(0);
  }
  fit.intercept = ybar - xbar.dot(fit.beta);

  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    double pred = fit.intercept;
    for (Eigen::Index c = 0; c < k; ++c) {
      pred += fit.beta(c) * bits[ii][columns[static_cast<std::size_t>(c)]];
    }
    ss_res += w[ii] * (y[ii] - pred) * (y[ii] - pred);
    ss_tot += w[ii] * (y[ii] - ybar) * (y[ii] - ybar);
  }
  // A constant target (up to rounding) fitted exactly counts as perfect fidelity.
  const double tiny = 1e-24 * wsum;
  if (ss_tot <= tiny) {
    fit.r2 = ss_res <= tiny ? 1.0 : 0.0;
  } else {
    fit.r2 = 1.0 - ss_res / ss_tot;
  }
  return fit;
}

}  // namespace detail

// Forward selection of at most n_selected bit columns by weighted R^2, then a
// weighted ridge fit on the selection.
inline LocalSurrogate fit_weighted_surrogate(const std::vector<std::vector<std::uint8_t>>& bits,
                                             FeatureView targets, FeatureView weights,
                                             std::size_t n_selected, double ridge) {
  if (bits.empty() || bits.size() != targets.size() || bits.size() != weights.size()) {
    throw ValidationError("LIME surrogate: samples, targets and weights must align");
  }
  const std::size_t m = bits.front().size();
  std::set<std::vector<std::uint8_t>> distinct(bits.begin(), bits.end());
  if (distinct.size() < 2) {
    throw NumericalError("LIME surrogate: degenerate design matrix, all " +
                         std::to_string(bits.size()) +
                         " samples share one interpretable vector");
  }

  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < m; ++j) {
    bool varies = false;
    for (std::size_t i = 1; i < bits.size() && !varies; ++i) varies = bits[i][j] != bits[0][j];
    if (varies) candidates.push_back(j);
  }

  std::vector<std::size_t> selected;
  if (candidates.size() <= n_selected) {
    selected = candidates;
  } else {
    std::vector<bool> used(m, false);
    while (selected.size() < n_selected) {
      double best_r2 = -std::numeric_limits<double>::infinity();
      std::size_t best = m;
      for (std::size_t j : candidates) {
        if (used[j]) continue;
        auto trial = selected;
        trial.push_back(j);
        const double r2 = detail::weighted_ridge(bits, targets, weights, trial, ridge).r2;
        if (r2 > best_r2) {
          best_r2 = r2;
          best = j;
        }
      }
      used[best] = true;
      selected.push_back(best);
    }
    std::sort(selected.begin(), selected.end());
  }

  const auto fit = detail::weighted_ridge(bits, targets, weights, selected, ridge);
  LocalSurrogate out;
  out.intercept = fit.intercept;
  out.coefficients.assign(m, 0.0);
  for (std::size_t c = 0; c < selected.size(); ++c) {
    out.coefficients[selected[c]] = fit.beta(static_cast<Eigen::Index>(c));
  }
  out.selected = selected;
  out.weighted_r2 = fit.r2;
  return out;
}

struct LimeCondition {
  std::size_t feature = 0;
  std::string name;
  std::string condition;
  std::size_t bin = 0;
  std::optional<double> lower;
  std::optional<double> upper;
  double value = 0.0;   // the instance's raw value
  double weight = 0.0;  // > 0 supports flood, < 0 opposes it
};

struct LimeExplanation {
  FeatureVector instance;
  int predicted_class = 0;
  double predicted_proba = 0.0;
  double intercept = 0.0;
  std::vector<LimeCondition> conditions;  // sorted by |weight|, descending
  double local_fidelity = 0.0;            // weighted R^2
  double surrogate_prediction = 0.0;      // intercept + sum of weights
  double kernel_width = 0.0;
  std::size_t samples_used = 0;

  const LimeCondition* find(std::string_view name) const {
    for (const auto& c : conditions) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

// Discretizer and scaler fitted once on the training rows.
struct LimeContext {
  Discretizer discretizer;
  Scaler scaler;

  static LimeContext fit(const Dataset& train, const LimeConfig& config) {
    return {fit_discretizer(train, config.n_bins), fit_scaler(train)};
  }
};

template <ProbabilityModel M>
LimeExplanation fit_local_surrogate(const M& model, std::span<const PerturbedSample> samples,
                                    const LimeContext& ctx, const LimeConfig& config) {
  if (samples.empty()) throw ValidationError("LIME: no samples");
  const FeatureVector& instance = samples.front().x;
  const std::size_t m = instance.size();
  config.validate(m);
  const double width = config.kernel_width_for(m);

  FeatureVector targets;
  targets.reserve(samples.size());
  std::vector<std::vector<std::uint8_t>> bits;
  bits.reserve(samples.size());
  for (const auto& s : samples) {
    targets.push_back(model.predict_proba(s.x));
    bits.push_back(s.bits);
  }
  const FeatureVector weights = proximity_weights(samples, instance, ctx.scaler, width);
  const LocalSurrogate fit =
      fit_weighted_surrogate(bits, targets, weights, config.n_selected_features, config.ridge);

  LimeExplanation e;
  e.instance = instance;
  e.predicted_proba = targets.front();
  e.predicted_class = e.predicted_proba >= 0.5 ? 1 : 0;
  e.intercept = fit.intercept;
  e.local_fidelity = fit.weighted_r2;
  e.kernel_width = width;
  e.samples_used = samples.size();
  e.surrogate_prediction = fit.intercept;
  for (std::size_t j : fit.selected) {
    LimeCondition c;
    c.feature = j;
    c.name = ctx.discretizer.feature_names[j];
    c.bin = ctx.discretizer.bin_of(j, instance[j]);
    c.condition = ctx.discretizer.condition(j, c.bin);
    c.lower = ctx.discretizer.lower_bound_of(j, c.bin);
    c.upper = ctx.discretizer.upper_bound_of(j, c.bin);
    c.value = instance[j];
    c.weight = fit.coefficients[j];
    e.surrogate_prediction += c.weight;
    e.conditions.push_back(std::move(c));
  }
  std::stable_sort(e.conditions.begin(), e.conditions.end(), [](const auto& a, const auto& b) {
    return std::abs(a.weight) > std::abs(b.weight);
  });
  return e;
}

template <ProbabilityModel M>
LimeExplanation explain_local(const M& model, FeatureView instance, const LimeContext& ctx,
                              const LimeConfig& config) {
  config.validate(instance.size());
  const auto samples = perturb(instance, ctx.discretizer, config);
  return fit_local_surrogate(model, std::span<const PerturbedSample>(samples), ctx, config);
}

template <ProbabilityModel M>
LimeExplanation explain_local(const M& model, FeatureView instance, const Dataset& train,
                              const LimeConfig& config) {
  return explain_local(model, instance, LimeContext::fit(train, config), config);
}

struct SignAgreement {
  std::string feature;
  double shap_phi = 0.0;
  double lime_weight = 0.0;
  bool agree = false;
};

struct AgreementReport {
  std::size_t k = 0;
  std::vector<std::string> shap_top;
  std::vector<std::string> lime_features;
  std::vector<std::string> shared;
  // |shared| / min(k, |lime_features|)
  double overlap = 0.0;
  std::vector<SignAgreement> signs;
  std::optional<double> sign_agreement_rate;
};

// Overlap of SHAP's top-k features with the features named by LIME
// conditions. When a local SHAP explanation of the same instance is given,
// also checks sign agreement on every LIME feature with a nonzero weight.
inline AgreementReport compare_explanations(const GlobalImportance& shap_global,
                                            const LimeExplanation& lime_local,
                                            std::size_t k = 5,
                                            const ShapExplanation* shap_local = nullptr) {
  AgreementReport r;
  r.k = std::min(k, shap_global.ranking.size());
  for (std::size_t i = 0; i < r.k; ++i) {
    r.shap_top.push_back(shap_global.feature_names[shap_global.ranking[i]]);
  }
  for (const auto& c : lime_local.conditions) r.lime_features.push_back(c.name);
  for (const auto& name : r.shap_top) {
    if (std::find(r.lime_features.begin(), r.lime_features.end(), name) !=
        r.lime_features.end()) {
      r.shared.push_back(name);
    }
  }
  const std::size_t denom = std::min(r.k, r.lime_features.size());
  r.overlap = denom == 0 ? 0.0 : static_cast<double>(r.shared.size()) / static_cast<double>(denom);

  if (shap_local) {
    std::size_t agree = 0;
    for (const auto& c : lime_local.conditions) {
      if (c.weight == 0.0 || c.feature >= shap_local->phi.size()) continue;
      const double phi = shap_local->phi[c.feature];
      SignAgreement s{c.name, phi, c.weight, (phi > 0.0) == (c.weight > 0.0) && phi != 0.0};
      agree += s.agree ? 1 : 0;
      r.signs.push_back(s);
    }
    if (!r.signs.empty()) {
      r.sign_agreement_rate = static_cast<double>(agree) / static_cast<double>(r.signs.size());
    }
  }
  return r;
}

}  // namespace floodxai

#endif  // FLOODXAI_LIME_HPP_
