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

#ifndef FLOODXAI_SHAP_HPP_
#define FLOODXAI_SHAP_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "floodxai/common.hpp"
#include "floodxai/dataset.hpp"
#include "floodxai/models.hpp"

namespace floodxai {

// Bit i set means feature i takes the explained instance's value.
using CoalitionMask = std::uint64_t;

inline constexpr std::size_t kMaxExactFeatures = 20;
inline constexpr std::size_t kMaxKernelFeatures = 62;

// Reference rows supplying the values of absent features.
struct Background {
  std::vector<FeatureVector> rows;

  static Background from_dataset(const Dataset& d) { return {d.rows()}; }

  // Single-row background at the column means.
  static Background mean_of(const Dataset& d) { return {{monthly_means(d)}}; }

  std::size_t num_features() const { return rows.empty() ? 0 : rows.front().size(); }
};

// v(S): the model output with features in S taken from the instance and the
// rest from each background row, averaged over the background.
template <ProbabilityModel M>
class CoalitionGame {
 public:
  CoalitionGame(const M& model, FeatureVector instance, const Background& background)
      : model_(&model), instance_(std::move(instance)), background_(&background) {
    if (background.rows.empty()) throw ValidationError("empty SHAP background");
    if (background.num_features() != instance_.size()) {
      throw ValidationError("background has " + std::to_string(background.num_features()) +
                            " features, instance has " + std::to_string(instance_.size()));
    }
  }

  std::size_t num_features() const { return instance_.size(); }
  const FeatureVector& instance() const { return instance_; }

  double operator()(CoalitionMask mask) const {
    FeatureVector x(instance_.size());
    double sum = 0.0;
    for (const auto& ref : background_->rows) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        x[j] = (mask >> j) & 1U ? instance_[j] : ref[j];
      }
      sum += model_->predict_proba(x);
    }
    return sum / static_cast<double>(background_->rows.size());
  }

 private:
  const M* model_;
  FeatureVector instance_;
  const Background* background_;
};

template <typename G>
concept CoalitionValueFunction = requires(const G& g, CoalitionMask mask) {
  { g(mask) } -> std::convertible_to<double>;
  { g.num_features() } -> std::convertible_to<std::size_t>;
};

// Every coalition value evaluated once up front; repeated explanations of the
// same instance (e.g. across sampling seeds) then cost no model calls.
class TabulatedGame {
 public:
  template <CoalitionValueFunction G>
  explicit TabulatedGame(const G& game) : num_features_(game.num_features()) {
    if (num_features_ > kMaxExactFeatures) {
      throw ValidationError("cannot tabulate a game with more than " +
                            std::to_string(kMaxExactFeatures) + " features");
    }
    values_.resize(std::size_t{1} << num_features_);
    for (CoalitionMask mask = 0; mask < values_.size(); ++mask) values_[mask] = game(mask);
  }

  std::size_t num_features() const { return num_features_; }
  double operator()(CoalitionMask mask) const { return values_[mask]; }

 private:
  std::size_t num_features_;
  std::vector<double> values_;
};

template <ProbabilityModel M>
double coalition_value(const M& model, FeatureView instance,
                       std::span<const std::size_t> subset, const Background& background) {
  CoalitionMask mask = 0;
  for (std::size_t i : subset) {
    if (i >= instance.size()) throw ValidationError("coalition index out of range");
    mask |= CoalitionMask{1} << i;
  }
  return CoalitionGame<M>(model, {instance.begin(), instance.end()}, background)(mask);
}

struct ShapExplanation {
  double base_value = 0.0;
  FeatureVector phi;
  FeatureVector instance;
  double model_output = 0.0;
  // base_value + sum(phi) - model_output
  double additivity_residual = 0.0;
  std::string method;
  std::size_t coalitions_evaluated = 0;
};

namespace detail {

inline double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

inline CoalitionMask full_mask(std::size_t m) {
  return m == 64 ? ~CoalitionMask{0} : (CoalitionMask{1} << m) - 1;
}

// Shapley kernel weight of one coalition of the given size.
inline double shapley_kernel_weight(std::size_t m, std::size_t size) {
  return static_cast<double>(m - 1) /
         (binomial(m, size) * static_cast<double>(size) * static_cast<double>(m - size));
}

// Next mask with the same popcount (Gosper's hack).
inline CoalitionMask next_same_size(CoalitionMask v) {
  const CoalitionMask t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

// Coalition sizes s and m - s are handled together. Singletons and their
// complements are always enumerated (the minimum budget covers them and they
// alone give a full-rank design). Walking outward from there, a size pair whose expected share of the remaining budget
// covers all of its coalitions is enumerated with exact kernel weights. The
// leftover budget draws sizes from the unfilled pairs in proportion to their
// kernel mass, a uniform subset of that size and its complement; those draws
// share the unfilled kernel mass equally, with duplicates merged.
inline void sample_coalitions(std::size_t m, std::size_t budget, std::uint64_t seed,
                              std::map<CoalitionMask, double>& weights) {
  const CoalitionMask full = full_mask(m);
  const std::size_t half = m / 2;
  std::vector<double> mass(half + 1, 0.0);
  std::vector<double> count(half + 1, 0.0);
  for (std::size_t s = 1; s <= half; ++s) {
    const bool paired = s != m - s;
    mass[s] = static_cast<double>(m - 1) / static_cast<double>(s * (m - s)) * (paired ? 2 : 1);
    count[s] = binomial(m, s) * (paired ? 2 : 1);
  }

  std::vector<bool> filled(half + 1, false);
  double remaining = static_cast<double>(budget);
  for (std::size_t s = 1; s <= half; ++s) {
    double open_mass = 0.0;
    for (std::size_t t = s; t <= half; ++t) open_mass += mass[t];
    if (s > 1 && remaining * mass[s] / open_mass + 1e-8 < count[s]) break;
    const double w = shapley_kernel_weight(m, s);
    for (CoalitionMask mask = (CoalitionMask{1} << s) - 1; mask <= full;
         mask = next_same_size(mask)) {
      weights[mask] = w;
      weights[full & ~mask] = w;
      if (mask == full) break;
    }
    filled[s] = true;
    remaining -= count[s];
  }

  std::vector<std::size_t> open;
  std::vector<double> cumulative;
  double open_mass = 0.0;
  for (std::size_t s = 1; s <= half; ++s) {
    if (filled[s]) continue;
    open.push_back(s);
    open_mass += mass[s];
    cumulative.push_back(open_mass);
  }
  const auto draws = static_cast<std::size_t>(remaining) / 2;
  if (open.empty() || draws == 0) return;

  Rng rng(seed);
  std::map<CoalitionMask, double> counts;
  std::vector<std::size_t> features(m);
  for (std::size_t d = 0; d < draws; ++d) {
    const double u = uniform_unit(rng) * open_mass;
    std::size_t k = 0;
    while (k + 1 < open.size() && cumulative[k] <= u) ++k;
    std::size_t size = open[k];
    if (size != m - size && uniform_unit(rng) < 0.5) size = m - size;
    for (std::size_t j = 0; j < m; ++j) features[j] = j;
    CoalitionMask mask = 0;
    for (std::size_t j = 0; j < size; ++j) {
      const auto pick = j + static_cast<std::size_t>(uniform_index(rng, m - j));
      std::swap(features[j], features[pick]);
      mask |= CoalitionMask{1} << features[j];
    }
    counts[mask] += 1.0;
    counts[full & ~mask] += 1.0;
  }
  // Unfilled sizes carry this much kernel weight in total.
  double open_weight = 0.0;
  for (std::size_t s : open) open_weight += mass[s];
  const double per_draw = open_weight / static_cast<double>(2 * draws);
  for (const auto& [mask, c] : counts) weights[mask] += c * per_draw;
}

inline double residual(const ShapExplanation& e) {
  double s = e.base_value;
  for (double p : e.phi) s += p;
  return s - e.model_output;
}

}  // namespace detail

// Exact Shapley values by enumerating all 2^M coalitions:
//   phi_i = sum_{S not containing i} |S|! (M - |S| - 1)! / M! [v(S + i) - v(S)]
template <CoalitionValueFunction G>
ShapExplanation exact_shapley(const G& game) {
  const std::size_t m = game.num_features();
  if (m == 0) throw ValidationError("exact_shapley: no features");
  if (m > kMaxExactFeatures) {
    throw ValidationError("exact_shapley: " + std::to_string(m) +
                          " features exceed the enumeration limit of " +
                          std::to_string(kMaxExactFeatures) + "; use kernel_shap");
  }
  const std::size_t count = std::size_t{1} << m;
  std::vector<double> v(count);
  for (CoalitionMask mask = 0; mask < count; ++mask) v[mask] = game(mask);

  // weight[s] = s! (m - s - 1)! / m! = 1 / (m * C(m - 1, s))
  std::vector<double> weight(m);
  for (std::size_t s = 0; s < m; ++s) {
    weight[s] = 1.0 / (static_cast<double>(m) * detail::binomial(m - 1, s));
  }

  ShapExplanation e;
  e.method = "exact";
  e.phi.assign(m, 0.0);
  e.base_value = v[0];
  e.model_output = v[count - 1];
  e.coalitions_evaluated = count;
  for (std::size_t i = 0; i < m; ++i) {
    const CoalitionMask bit = CoalitionMask{1} << i;
    double phi = 0.0;
    for (CoalitionMask mask = 0; mask < count; ++mask) {
      if (mask & bit) continue;
      phi += weight[static_cast<std::size_t>(std::popcount(mask))] * (v[mask | bit] - v[mask]);
    }
    e.phi[i] = phi;
  }
  e.additivity_residual = detail::residual(e);
  return e;
}

template <ProbabilityModel M>
ShapExplanation exact_shapley(const M& model, FeatureView instance,
                              const Background& background) {
  CoalitionGame<M> game(model, {instance.begin(), instance.end()}, background);
  ShapExplanation e = exact_shapley(game);
  e.instance = game.instance();
  return e;
}

struct ShapConfig {
  Background background;
  // Number of sampled coalitions; empty means enumerate every coalition.
  std::optional<std::size_t> n_coalition_samples;
  std::uint64_t seed = 42;
};

inline std::size_t min_kernel_samples(std::size_t m) { return 2 * m + 2; }

// Kernel SHAP: weighted least squares fit of phi_0 + sum phi_i z_i to the
// coalition values with Shapley kernel weights. phi_0 = v(empty) and the
// efficiency constraint sum phi_i = v(full) - v(empty) is imposed exactly by
// eliminating the last coefficient.
//
// Sampled mode spends the budget as described at detail::sample_coalitions.
// Exhaustive mode uses every interior coalition with its exact kernel weight
// and reproduces exact_shapley.
template <CoalitionValueFunction G>
ShapExplanation kernel_shap(const G& game, std::optional<std::size_t> samples,
                            std::uint64_t seed) {
  const std::size_t m = game.num_features();
  if (m == 0) throw ValidationError("kernel_shap: no features");
  if (m > kMaxKernelFeatures) throw ValidationError("kernel_shap: too many features");
  if (!samples && m > kMaxExactFeatures) {
    throw ValidationError("kernel_shap: exhaustive mode limited to " +
                          std::to_string(kMaxExactFeatures) + " features");
  }
  if (samples && *samples < min_kernel_samples(m)) {
    throw ValidationError("kernel_shap: sample budget " + std::to_string(*samples) +
                          " below the minimum " + std::to_string(min_kernel_samples(m)) +
                          " for " + std::to_string(m) + " features");
  }

  const CoalitionMask full = detail::full_mask(m);
  ShapExplanation e;
  e.base_value = game(0);
  e.model_output = game(full);
  e.phi.assign(m, 0.0);
  const double delta = e.model_output - e.base_value;

  if (m == 1) {
    e.phi[0] = delta;
    e.method = samples ? "kernel-sampled" : "kernel-exhaustive";
    e.coalitions_evaluated = 2;
    e.additivity_residual = detail::residual(e);
    return e;
  }

  // Ordered by mask so that the regression is assembled in a fixed order.
  std::map<CoalitionMask, double> weights;
  if (!samples) {
    e.method = "kernel-exhaustive";
    for (CoalitionMask mask = 1; mask < full; ++mask) {
      weights[mask] = detail::shapley_kernel_weight(
          m, static_cast<std::size_t>(std::popcount(mask)));
    }
  } else {
    e.method = "kernel-sampled";
    detail::sample_coalitions(m, *samples, seed, weights);
  }

  const std::size_t rows = weights.size();
  const std::size_t last = m - 1;
  Eigen::MatrixXd design(rows, last);
  Eigen::VectorXd target(rows);
  std::size_t r = 0;
  for (const auto& [mask, w] : weights) {
    const double sw = std::sqrt(w);
    const double z_last = static_cast<double>((mask >> last) & 1U);
    for (std::size_t j = 0; j < last; ++j) {
      design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          sw * (static_cast<double>((mask >> j) & 1U) - z_last);
    }
    target(static_cast<Eigen::Index>(r)) = sw * (game(mask) - e.base_value - z_last * delta);
    ++r;
  }
  e.coalitions_evaluated = rows + 2;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < static_cast<Eigen::Index>(last)) {
    throw NumericalError("kernel_shap: coalition design is rank deficient (rank " +
                         std::to_string(qr.rank()) + " of " + std::to_string(last) +
                         "); increase the sample budget");
  }
  const Eigen::VectorXd solution = qr.solve(target);
  double sum = 0.0;
  for (std::size_t j = 0; j < last; ++j) {
    e.phi[j] = solution(static_cast<Eigen::Index>(j));
    sum += e.phi[j];
  }
  e.phi[last] = delta - sum;
  e.additivity_residual = detail::residual(e);
  return e;
}

template <ProbabilityModel M>
ShapExplanation kernel_shap(const M& model, FeatureView instance, const ShapConfig& config) {
  CoalitionGame<M> game(model, {instance.begin(), instance.end()}, config.background);
  ShapExplanation e = kernel_shap(game, config.n_coalition_samples, config.seed);
  e.instance = game.instance();
  return e;
}

// Indices sorted by descending value; equal values keep index order.
inline std::vector<std::size_t> rank_descending(FeatureView values) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

struct GlobalImportance {
  std::vector<std::string> feature_names;
  FeatureVector importance;  // mean |phi| per feature
  FeatureVector mean_phi;    // signed mean, for direction
  std::vector<std::size_t> ranking;
  std::size_t instances = 0;
  double max_abs_residual = 0.0;
};

// Kernel SHAP on every row (row i uses seed + i), then mean absolute
// attribution per feature.
template <ProbabilityModel M>
GlobalImportance global_importance(const M& model, const Dataset& data,
                                   const ShapConfig& config) {
  if (data.empty()) throw ValidationError("global_importance: empty dataset");
  const std::size_t m = data.num_features();
  GlobalImportance g;
  g.feature_names = data.feature_names;
  g.importance.assign(m, 0.0);
  g.mean_phi.assign(m, 0.0);
  ShapConfig row_config = config;
  for (std::size_t i = 0; i < data.size(); ++i) {
    row_config.seed = config.seed + i;
    CoalitionGame<M> game(model, data.records[i].monthly_mm, config.background);
    const ShapExplanation e = kernel_shap(game, row_config.n_coalition_samples, row_config.seed);
    for (std::size_t j = 0; j < m; ++j) {
      g.importance[j] += std::abs(e.phi[j]);
      g.mean_phi[j] += e.phi[j];
    }
    g.max_abs_residual = std::max(g.max_abs_residual, std::abs(e.additivity_residual));
  }
  for (std::size_t j = 0; j < m; ++j) {
    g.importance[j] /= static_cast<double>(data.size());
    g.mean_phi[j] /= static_cast<double>(data.size());
  }
  g.ranking = rank_descending(g.importance);
  g.instances = data.size();
  return g;
}

}  // namespace floodxai

#endif  // FLOODXAI_SHAP_HPP_
