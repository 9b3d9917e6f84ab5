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

#ifndef FLOODXAI_MODELS_HPP_
#define FLOODXAI_MODELS_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "floodxai/common.hpp"
#include "floodxai/dataset.hpp"

namespace floodxai {

// Anything that maps a feature vector to the flood-class probability.
// Explainers and the evaluator only depend on this contract.
template <typename M>
concept ProbabilityModel = requires(const M& m, FeatureView x) {
  { m.predict_proba(x) } -> std::convertible_to<double>;
};

// Probability 0.5 maps to the flood class.
template <ProbabilityModel M>
int predict_class(const M& model, FeatureView x) {
  return model.predict_proba(x) >= 0.5 ? 1 : 0;
}

// Wraps a callable as a ProbabilityModel (handy for synthetic black boxes).
template <typename F>
struct FunctionModel {
  F fn;
  double predict_proba(FeatureView x) const { return fn(x); }
};
template <typename F>
FunctionModel(F) -> FunctionModel<F>;

inline double euclidean_distance(FeatureView a, FeatureView b) {
  if (a.size() != b.size()) {
    throw ValidationError("euclidean_distance: length mismatch (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

namespace detail {

inline void require_width(std::size_t expected, FeatureView x) {
  if (x.size() != expected) {
    throw ValidationError("model expects " + std::to_string(expected) +
                          " features, got " + std::to_string(x.size()));
  }
}

inline void require_both_classes(const Dataset& train, const char* who) {
  if (train.empty()) throw ValidationError(std::string(who) + ": empty training set");
  bool has0 = false;
  bool has1 = false;
  for (const auto& r : train.records) {
    if (r.flood == 1) has1 = true; else has0 = true;
  }
  if (!has0 || !has1) {
    throw ValidationError(std::string(who) +
                          ": training set must contain both classes");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

struct LogisticConfig {
  double learning_rate = 0.01;
  int epochs = 5000;
  double l2 = 1e-4;
};

// log(p / (1 - p)) = intercept + weights . x, with x in raw millimetres.
struct LogisticModel {
  FeatureVector weights;
  double intercept = 0.0;
  LogisticConfig config;

  double logit(FeatureView x) const {
    detail::require_width(weights.size(), x);
    return intercept + dot(weights, x);
  }
  double predict_proba(FeatureView x) const { return sigmoid(logit(x)); }
};

// Mean negative log-likelihood plus (l2 / 2) ||w||^2; the intercept is not
// penalized.
inline double logistic_loss(FeatureView weights, double intercept,
                            std::span<const FeatureVector> rows,
                            std::span<const int> labels, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double t = intercept + dot(weights, rows[i]);
    // -log sigmoid(t) = log1p(exp(-t)), evaluated without overflow.
    const double nll_pos = t >= 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
    const double nll_neg = nll_pos + t;
    loss += labels[i] == 1 ? nll_pos : nll_neg;
  }
  loss /= static_cast<double>(rows.size());
  return loss + 0.5 * l2 * dot(weights, weights);
}

// Gradient of logistic_loss; the last element is d/d intercept.
inline FeatureVector logistic_gradient(FeatureView weights, double intercept,
                                       std::span<const FeatureVector> rows,
                                       std::span<const int> labels, double l2) {
  const std::size_t m = weights.size();
  FeatureVector grad(m + 1, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double err = sigmoid(intercept + dot(weights, rows[i])) - labels[i];
    for (std::size_t j = 0; j < m; ++j) grad[j] += err * rows[i][j];
    grad[m] += err;
  }
  const double n = static_cast<double>(rows.size());
  for (std::size_t j = 0; j <= m; ++j) grad[j] /= n;
  for (std::size_t j = 0; j < m; ++j) grad[j] += l2 * weights[j];
  return grad;
}

// Full-batch gradient descent in standardized coordinates. The fitted
// standardization is folded back into the returned weights so the model
// consumes raw features. loss_history, if given, receives the loss before
// every epoch plus the final loss.
inline LogisticModel train_logistic(const Dataset& train,
                                    const LogisticConfig& config = {},
                                    std::vector<double>* loss_history = nullptr) {
  detail::require_both_classes(train, "train_logistic");
  if (!(config.learning_rate > 0.0) || config.epochs < 1 || config.l2 < 0.0) {
    throw ValidationError("train_logistic: invalid hyperparameters");
  }
  const Scaler scaler = fit_scaler(train);
  const auto rows = scaler.apply(train).rows();
  const auto labels = train.labels();
  const std::size_t m = train.num_features();

  FeatureVector w(m, 0.0);
  double b = 0.0;
  if (loss_history) loss_history->clear();
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (loss_history) {
      loss_history->push_back(logistic_loss(w, b, rows, labels, config.l2));
    }
    const auto grad = logistic_gradient(w, b, rows, labels, config.l2);
    for (std::size_t j = 0; j < m; ++j) w[j] -= config.learning_rate * grad[j];
    b -= config.learning_rate * grad[m];
  }
  if (loss_history) loss_history->push_back(logistic_loss(w, b, rows, labels, config.l2));

  LogisticModel model;
  model.config = config;
  model.weights.resize(m);
  model.intercept = b;
  for (std::size_t j = 0; j < m; ++j) {
    model.weights[j] = w[j] / scaler.stddev[j];
    model.intercept -= w[j] * scaler.mean[j] / scaler.stddev[j];
  }
  return model;
}

// ---------------------------------------------------------------------------
// K nearest neighbours
// ---------------------------------------------------------------------------

struct KnnModel {
  int k = 5;
  Scaler scaler;
  std::vector<FeatureVector> points;  // standardized training rows
  std::vector<int> labels;

  struct Vote {
    int flood_votes = 0;
    int nearest_label = 0;
  };

  // Neighbour order is (distance, coordinates, label), so it never depends on
  // the order the training rows were stored in.
  Vote vote(FeatureView x) const {
    detail::require_width(scaler.size(), x);
    const FeatureVector q = scaler.apply(x);
    std::vector<std::pair<double, std::size_t>> dist(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) {
        const double d = q[j] - points[i][j];
        s += d * d;
      }
      dist[i] = {s, i};
    }
    auto less = [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      if (points[a.second] != points[b.second]) return points[a.second] < points[b.second];
      return labels[a.second] < labels[b.second];
    };
    const auto kk = static_cast<std::size_t>(k);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk),
                      dist.end(), less);
    Vote v;
    v.nearest_label = labels[dist[0].second];
    for (std::size_t i = 0; i < kk; ++i) v.flood_votes += labels[dist[i].second];
    return v;
  }

  // Majority vote; an exact tie goes to the nearest neighbour's class.
  int predict(FeatureView x) const {
    const Vote v = vote(x);
    if (2 * v.flood_votes == k) return v.nearest_label;
    return 2 * v.flood_votes > k ? 1 : 0;
  }

  // Fraction of flood votes. On an exact tie resolved toward no-flood the
  // value is nudged one ulp below 0.5 so thresholding agrees with predict().
  double predict_proba(FeatureView x) const {
    const Vote v = vote(x);
    if (2 * v.flood_votes == k) {
      return v.nearest_label == 1 ? 0.5 : std::nextafter(0.5, 0.0);
    }
    return static_cast<double>(v.flood_votes) / k;
  }
};

inline KnnModel train_knn(const Dataset& train, int k = 5) {
  if (train.empty()) throw ValidationError("train_knn: empty training set");
  if (k < 1 || static_cast<std::size_t>(k) > train.size()) {
    throw ValidationError("train_knn: K must lie in [1, " +
                          std::to_string(train.size()) + "], got " + std::to_string(k));
  }
  KnnModel model;
  model.k = k;
  model.scaler = fit_scaler(train);
  model.points = model.scaler.apply(train).rows();
  model.labels = train.labels();
  return model;
}

inline int predict_knn(const KnnModel& model, FeatureView x) { return model.predict(x); }

// ---------------------------------------------------------------------------
// Decision tree
// ---------------------------------------------------------------------------

// Shannon entropy in bits of an arbitrary multiset of class values.
inline double entropy(std::span<const int> labels) {
  if (labels.empty()) throw ValidationError("entropy of an empty multiset");
  std::map<int, std::size_t> counts;
  for (int v : labels) ++counts[v];
  const double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (const auto& [value, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;
}

namespace detail {
inline double binary_entropy(std::size_t positives, std::size_t n) {
  if (n == 0 || positives == 0 || positives == n) return 0.0;
  const double p = static_cast<double>(positives) / static_cast<double>(n);
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}
}  // namespace detail

struct TreeConfig {
  int max_depth = 5;
  int min_samples_leaf = 2;
};

// Flat node storage; children are indices into TreeModel::nodes. Rows with
// x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double p_flood = 0.0;
  double node_entropy = 0.0;
  std::size_t n_samples = 0;
  double gain = 0.0;  // information gain of this node's split, 0 for leaves

  bool is_leaf() const { return feature < 0; }
};

struct TreeModel {
  std::vector<TreeNode> nodes;
  TreeConfig config;
  std::size_t num_features = 0;

  const TreeNode& leaf_for(FeatureView x) const {
    detail::require_width(num_features, x);
    const TreeNode* node = &nodes.at(0);
    while (!node->is_leaf()) {
      node = &nodes[static_cast<std::size_t>(
          x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                          : node->right)];
    }
    return *node;
  }

  double predict_proba(FeatureView x) const { return leaf_for(x).p_flood; }

  int depth() const { return depth_from(0); }

 private:
  int depth_from(int index) const {
    const auto& n = nodes[static_cast<std::size_t>(index)];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_from(n.left), depth_from(n.right));
  }
};

namespace detail {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Best information-gain split over midpoints of consecutive distinct values.
// Ties keep the lowest feature index, then the lowest threshold.
inline SplitChoice best_split(const std::vector<FeatureVector>& rows,
                              const std::vector<int>& labels,
                              const std::vector<std::size_t>& idx,
                              int min_samples_leaf) {
  const std::size_t n = idx.size();
  std::size_t positives = 0;
  for (auto i : idx) positives += static_cast<std::size_t>(labels[i]);
  const double parent = binary_entropy(positives, n);
  const std::size_t m = rows[idx[0]].size();
  const auto min_leaf = static_cast<std::size_t>(std::max(1, min_samples_leaf));

  SplitChoice best;
  std::vector<std::size_t> order = idx;
  for (std::size_t f = 0; f < m; ++f) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return rows[a][f] < rows[b][f];
    });
    std::size_t left_pos = 0;
    for (std::size_t cut = 1; cut < n; ++cut) {
      left_pos += static_cast<std::size_t>(labels[order[cut - 1]]);
      const double lo = rows[order[cut - 1]][f];
      const double hi = rows[order[cut]][f];
      if (lo == hi) continue;
      if (cut < min_leaf || n - cut < min_leaf) continue;
      const double wl = static_cast<double>(cut) / static_cast<double>(n);
      const double child = wl * binary_entropy(left_pos, cut) +
                           (1.0 - wl) * binary_entropy(positives - left_pos, n - cut);
      const double gain = parent - child;
      if (gain > best.gain + 1e-12) {
        best = {static_cast<int>(f), lo + (hi - lo) / 2.0, gain};
      }
    }
  }
  return best;
}

inline int grow(TreeModel& tree, const std::vector<FeatureVector>& rows,
                const std::vector<int>& labels, const std::vector<std::size_t>& idx,
                int depth) {
  std::size_t positives = 0;
  for (auto i : idx) positives += static_cast<std::size_t>(labels[i]);
  TreeNode node;
  node.n_samples = idx.size();
  node.p_flood = static_cast<double>(positives) / static_cast<double>(idx.size());
  node.node_entropy = binary_entropy(positives, idx.size());
  const int self = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back(node);

  if (node.node_entropy == 0.0 || depth >= tree.config.max_depth) return self;
  const SplitChoice split = best_split(rows, labels, idx, tree.config.min_samples_leaf);
  if (split.feature < 0) return self;

  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  for (auto i : idx) {
    (rows[i][static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right)
        .push_back(i);
  }
  const int l = grow(tree, rows, labels, left, depth + 1);
  const int r = grow(tree, rows, labels, right, depth + 1);
  auto& stored = tree.nodes[static_cast<std::size_t>(self)];
  stored.feature = split.feature;
  stored.threshold = split.threshold;
  stored.gain = split.gain;
  stored.left = l;
  stored.right = r;
  return self;
}

}  // namespace detail

// Greedy entropy-driven binary tree on raw features. Growth stops at pure
// nodes, at max_depth, or when no split leaves min_samples_leaf rows per side
// with positive gain.
inline TreeModel train_tree(const Dataset& train, const TreeConfig& config = {}) {
  if (train.empty()) throw ValidationError("train_tree: empty training set");
  if (config.max_depth < 0 || config.min_samples_leaf < 1) {
    throw ValidationError("train_tree: invalid hyperparameters");
  }
  TreeModel tree;
  tree.config = config;
  tree.num_features = train.num_features();
  const auto rows = train.rows();
  const auto labels = train.labels();
  std::vector<std::size_t> idx(rows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  detail::grow(tree, rows, labels, idx, 0);
  return tree;
}

// ---------------------------------------------------------------------------
// Linear soft-margin SVM
// ---------------------------------------------------------------------------

struct SvmConfig {
  double c = 1.0;
  int epochs = 2000;
  double learning_rate = 0.1;
};

// Hyperplane in raw feature units. predict_proba is the logistic squashing of
// the decision value and is not a calibrated probability.
struct SvmModel {
  FeatureVector weights;
  double bias = 0.0;
  SvmConfig config;

  double decision_function(FeatureView x) const {
    detail::require_width(weights.size(), x);
    return dot(weights, x) + bias;
  }
  double predict_proba(FeatureView x) const { return sigmoid(decision_function(x)); }
};

// ||w||^2 / (2 C n) + mean hinge loss, labels in {-1, +1}. Same minimizer as
// the textbook ||w||^2 / 2 + C * sum of hinge losses.
inline double svm_objective(FeatureView w, double b, std::span<const FeatureVector> rows,
                            std::span<const int> signs, double c) {
  const double n = static_cast<double>(rows.size());
  double hinge = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    hinge += std::max(0.0, 1.0 - signs[i] * (dot(w, rows[i]) + b));
  }
  return dot(w, w) / (2.0 * c * n) + hinge / n;
}

struct SvmTrace {
  double initial_objective = 0.0;
  double final_objective = 0.0;   // at the averaged iterate
  double best_iterate_objective = 0.0;
};

// Full-batch subgradient descent with step learning_rate / sqrt(t) on
// standardized features. The returned hyperplane is the average of the
// iterates from the second half of training, mapped back to raw units.
inline SvmModel train_svm(const Dataset& train, const SvmConfig& config = {},
                          SvmTrace* trace = nullptr) {
  detail::require_both_classes(train, "train_svm");
  if (!(config.c > 0.0) || config.epochs < 1 || !(config.learning_rate > 0.0)) {
    throw ValidationError("train_svm: invalid hyperparameters");
  }
  const Scaler scaler = fit_scaler(train);
  const auto rows = scaler.apply(train).rows();
  std::vector<int> signs;
  for (int label : train.labels()) signs.push_back(label == 1 ? 1 : -1);
  const std::size_t m = train.num_features();
  const double n = static_cast<double>(rows.size());

  FeatureVector w(m, 0.0);
  double b = 0.0;
  FeatureVector w_avg(m, 0.0);
  double b_avg = 0.0;
  int averaged = 0;
  const int average_from = config.epochs / 2;
  double best = svm_objective(w, b, rows, signs, config.c);
  const double initial = best;

  FeatureVector gw(m);
  for (int t = 1; t <= config.epochs; ++t) {
    for (std::size_t j = 0; j < m; ++j) gw[j] = w[j] / (config.c * n);
    double gb = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (signs[i] * (dot(w, rows[i]) + b) < 1.0) {
        for (std::size_t j = 0; j < m; ++j) gw[j] -= signs[i] * rows[i][j] / n;
        gb -= signs[i] / n;
      }
    }
    const double step = config.learning_rate / std::sqrt(static_cast<double>(t));
    for (std::size_t j = 0; j < m; ++j) w[j] -= step * gw[j];
    b -= step * gb;
    if (trace) best = std::min(best, svm_objective(w, b, rows, signs, config.c));
    if (t > average_from) {
      ++averaged;
      const double a = 1.0 / averaged;
      for (std::size_t j = 0; j < m; ++j) w_avg[j] += a * (w[j] - w_avg[j]);
      b_avg += a * (b - b_avg);
    }
  }
  if (trace) {
    trace->initial_objective = initial;
    trace->best_iterate_objective = best;
    trace->final_objective = svm_objective(w_avg, b_avg, rows, signs, config.c);
  }

  SvmModel model;
  model.config = config;
  model.weights.resize(m);
  model.bias = b_avg;
  for (std::size_t j = 0; j < m; ++j) {
    model.weights[j] = w_avg[j] / scaler.stddev[j];
    model.bias -= w_avg[j] * scaler.mean[j] / scaler.stddev[j];
  }
  return model;
}

// ---------------------------------------------------------------------------
// Type-erased trained model
// ---------------------------------------------------------------------------

enum class ModelKind { kLogistic, kKnn, kTree, kSvm };

inline std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogistic: return "logistic";
    case ModelKind::kKnn: return "knn";
    case ModelKind::kTree: return "tree";
    case ModelKind::kSvm: return "svm";
  }
  return "unknown";
}

inline ModelKind parse_model_kind(std::string_view name) {
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "knn") return ModelKind::kKnn;
  if (name == "tree") return ModelKind::kTree;
  if (name == "svm") return ModelKind::kSvm;
  throw ValidationError("unknown model kind '" + std::string(name) +
                        "' (expected logistic, knn, tree or svm)");
}

inline std::string display_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogistic: return "Logistic Regression";
    case ModelKind::kKnn: return "KNN";
    case ModelKind::kTree: return "Decision Tree";
    case ModelKind::kSvm: return "SVM";
  }
  return "unknown";
}

class TrainedModel {
 public:
  using State = std::variant<LogisticModel, KnnModel, TreeModel, SvmModel>;

  TrainedModel(State state, std::size_t num_features)
      : state_(std::move(state)), num_features_(num_features) {}

  double predict_proba(FeatureView x) const {
    return std::visit([&](const auto& m) { return m.predict_proba(x); }, state_);
  }
  int predict(FeatureView x) const { return predict_class(*this, x); }

  ModelKind kind() const { return static_cast<ModelKind>(state_.index()); }
  std::size_t num_features() const { return num_features_; }
  const State& state() const { return state_; }

 private:
  State state_;
  std::size_t num_features_;
};

struct Hyperparameters {
  LogisticConfig logistic;
  int k = 5;
  TreeConfig tree;
  SvmConfig svm;
};

inline TrainedModel train_model(ModelKind kind, const Dataset& train,
                                const Hyperparameters& hp = {}) {
  const std::size_t m = train.num_features();
  switch (kind) {
    case ModelKind::kLogistic: return {train_logistic(train, hp.logistic), m};
    case ModelKind::kKnn: return {train_knn(train, hp.k), m};
    case ModelKind::kTree: return {train_tree(train, hp.tree), m};
    case ModelKind::kSvm: return {train_svm(train, hp.svm), m};
  }
  throw ValidationError("unknown model kind");
}

}  // namespace floodxai

#endif  // FLOODXAI_MODELS_HPP_
