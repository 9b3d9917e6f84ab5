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

#ifndef FLOODXAI_IO_HPP_
#define FLOODXAI_IO_HPP_

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "floodxai/dataset.hpp"
#include "floodxai/lime.hpp"
#include "floodxai/metrics.hpp"
#include "floodxai/models.hpp"
#include "floodxai/shap.hpp"

// JSON encodings of models and reports. Doubles round-trip exactly, so a
// reloaded model predicts bit-identically.

namespace floodxai {

using Json = nlohmann::json;

inline constexpr int kModelSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

struct TrainingMetadata {
  std::uint64_t seed = 42;
  double train_fraction = 0.7;
  std::string impute = "column-mean";
  std::string label_column = "FLOODS";
  std::string dataset_fingerprint;
  std::size_t train_rows = 0;
};

struct ModelDocument {
  TrainedModel model;
  std::vector<std::string> feature_names;
  TrainingMetadata training;
};

namespace detail {

inline Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json scaler_json(const Scaler& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}};
}

inline Scaler scaler_from(const Json& j) {
  return {j.at("mean").get<FeatureVector>(), j.at("stddev").get<FeatureVector>()};
}

}  // namespace detail

inline Json hyperparameters_json(const TrainedModel& model) {
  return std::visit(
      [](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LogisticModel>) {
          return {{"learning_rate", m.config.learning_rate},
                  {"epochs", m.config.epochs},
                  {"l2", m.config.l2}};
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          return {{"k", m.k}};
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          return {{"max_depth", m.config.max_depth},
                  {"min_samples_leaf", m.config.min_samples_leaf}};
        } else {
          return {{"c", m.config.c},
                  {"epochs", m.config.epochs},
                  {"learning_rate", m.config.learning_rate}};
        }
      },
      model.state());
}

inline Json to_json(const ModelDocument& doc) {
  Json j;
  j["schema_version"] = kModelSchemaVersion;
  j["kind"] = to_string(doc.model.kind());
  j["feature_names"] = doc.feature_names;
  j["hyperparameters"] = hyperparameters_json(doc.model);
  j["scaler"] = nullptr;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        Json p;
        if constexpr (std::is_same_v<T, LogisticModel>) {
          p = {{"weights", m.weights}, {"intercept", m.intercept}};
        } else if constexpr (std::is_same_v<T, KnnModel>) {
          p = {{"points", m.points}, {"labels", m.labels}};
          j["scaler"] = detail::scaler_json(m.scaler);
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          Json nodes = Json::array();
          for (const auto& n : m.nodes) {
            nodes.push_back({{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"p_flood", n.p_flood},
                             {"entropy", n.node_entropy},
                             {"n_samples", n.n_samples},
                             {"gain", n.gain}});
          }
          p = {{"nodes", nodes}};
        } else {
          p = {{"weights", m.weights}, {"bias", m.bias}};
        }
        j["parameters"] = p;
      },
      doc.model.state());
  j["training"] = {{"seed", doc.training.seed},
                   {"train_fraction", doc.training.train_fraction},
                   {"impute", doc.training.impute},
                   {"label_column", doc.training.label_column},
                   {"dataset_fingerprint", doc.training.dataset_fingerprint},
                   {"train_rows", doc.training.train_rows}};
  return j;
}

inline ModelDocument model_from_json(const Json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw ValidationError("unsupported model schema version " + std::to_string(version));
    }
    const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
    const auto names = j.at("feature_names").get<std::vector<std::string>>();
    const Json& hp = j.at("hyperparameters");
    const Json& p = j.at("parameters");
    const std::size_t m = names.size();

    std::optional<TrainedModel> model;
    switch (kind) {
      case ModelKind::kLogistic: {
        LogisticModel lm;
        lm.config = {hp.at("learning_rate").get<double>(), hp.at("epochs").get<int>(),
                     hp.at("l2").get<double>()};
        lm.weights = p.at("weights").get<FeatureVector>();
        lm.intercept = p.at("intercept").get<double>();
        if (lm.weights.size() != m) throw ValidationError("logistic weight count mismatch");
        model.emplace(std::move(lm), m);
        break;
      }
      case ModelKind::kKnn: {
        KnnModel km;
        km.k = hp.at("k").get<int>();
        km.scaler = detail::scaler_from(j.at("scaler"));
        km.points = p.at("points").get<std::vector<FeatureVector>>();
        km.labels = p.at("labels").get<std::vector<int>>();
        if (km.k < 1 || static_cast<std::size_t>(km.k) > km.points.size() ||
            km.points.size() != km.labels.size() || km.scaler.size() != m) {
          throw ValidationError("inconsistent KNN parameters");
        }
        model.emplace(std::move(km), m);
        break;
      }
      case ModelKind::kTree: {
        TreeModel tm;
        tm.config = {hp.at("max_depth").get<int>(), hp.at("min_samples_leaf").get<int>()};
        tm.num_features = m;
        for (const auto& n : p.at("nodes")) {
          TreeNode node;
          node.feature = n.at("feature").get<int>();
          node.threshold = n.at("threshold").get<double>();
          node.left = n.at("left").get<int>();
          node.right = n.at("right").get<int>();
          node.p_flood = n.at("p_flood").get<double>();
          node.node_entropy = n.at("entropy").get<double>();
          node.n_samples = n.at("n_samples").get<std::size_t>();
          node.gain = n.at("gain").get<double>();
          tm.nodes.push_back(node);
        }
        const auto count = static_cast<int>(tm.nodes.size());
        if (count == 0) throw ValidationError("tree has no nodes");
        for (const auto& n : tm.nodes) {
          if (!n.is_leaf() && (n.feature >= static_cast<int>(m) || n.left <= 0 ||
                               n.right <= 0 || n.left >= count || n.right >= count)) {
            throw ValidationError("tree node references are out of range");
          }
        }
        model.emplace(std::move(tm), m);
        break;
      }
      case ModelKind::kSvm: {
        SvmModel sm;
        sm.config = {hp.at("c").get<double>(), hp.at("epochs").get<int>(),
                     hp.at("learning_rate").get<double>()};
        sm.weights = p.at("weights").get<FeatureVector>();
        sm.bias = p.at("bias").get<double>();
        if (sm.weights.size() != m) throw ValidationError("svm weight count mismatch");
        model.emplace(std::move(sm), m);
        break;
      }
    }

    const Json& t = j.at("training");
    TrainingMetadata meta;
    meta.seed = t.at("seed").get<std::uint64_t>();
    meta.train_fraction = t.at("train_fraction").get<double>();
    meta.impute = t.at("impute").get<std::string>();
    meta.label_column = t.at("label_column").get<std::string>();
    meta.dataset_fingerprint = t.at("dataset_fingerprint").get<std::string>();
    meta.train_rows = t.at("train_rows").get<std::size_t>();
    return {std::move(*model), names, meta};
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed model document: ") + e.what());
  }
}

inline Json to_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

inline Json to_json(const MetricsReport& r) {
  Json undefined = Json::array();
  if (!r.scores.accuracy) undefined.push_back("accuracy");
  if (!r.scores.precision) undefined.push_back("precision");
  if (!r.scores.recall) undefined.push_back("recall");
  if (!r.scores.f1) undefined.push_back("f1");
  return {{"model", r.model_name},
          {"partition", r.partition},
          {"accuracy", detail::optional_number(r.scores.accuracy)},
          {"precision", detail::optional_number(r.scores.precision)},
          {"recall", detail::optional_number(r.scores.recall)},
          {"f1", detail::optional_number(r.scores.f1)},
          {"undefined", undefined},
          {"confusion", to_json(r.matrix)}};
}

inline Json to_json(const ShapExplanation& e, std::span<const std::string> names) {
  Json phi = Json::object();
  for (std::size_t j = 0; j < e.phi.size(); ++j) phi[names[j]] = e.phi[j];
  return {{"feature_names", Json(std::vector<std::string>(names.begin(), names.end()))},
          {"phi_values", e.phi},
          {"phi", phi},
          {"base_value", e.base_value},
          {"model_output", e.model_output},
          {"additivity_residual", e.additivity_residual},
          {"instance", e.instance},
          {"method", e.method},
          {"coalitions_evaluated", e.coalitions_evaluated}};
}

inline Json to_json(const GlobalImportance& g) {
  std::vector<std::string> ranked;
  for (auto i : g.ranking) ranked.push_back(g.feature_names[i]);
  return {{"feature_names", g.feature_names},
          {"importance", g.importance},
          {"mean_phi", g.mean_phi},
          {"ranking", ranked},
          {"instances", g.instances},
          {"max_abs_residual", g.max_abs_residual}};
}

inline Json to_json(const LimeExplanation& e) {
  Json conditions = Json::array();
  for (const auto& c : e.conditions) {
    conditions.push_back({{"feature", c.name},
                          {"condition", c.condition},
                          {"bin", c.bin},
                          {"lower_mm", detail::optional_number(c.lower)},
                          {"upper_mm", detail::optional_number(c.upper)},
                          {"value_mm", c.value},
                          {"weight", c.weight}});
  }
  return {{"instance", e.instance},
          {"predicted_class", e.predicted_class},
          {"predicted_proba", e.predicted_proba},
          {"intercept", e.intercept},
          {"conditions", conditions},
          {"local_fidelity", e.local_fidelity},
          {"surrogate_prediction", e.surrogate_prediction},
          {"kernel_width", e.kernel_width},
          {"samples", e.samples_used}};
}

inline Json to_json(const AgreementReport& r) {
  Json signs = Json::array();
  for (const auto& s : r.signs) {
    signs.push_back({{"feature", s.feature},
                     {"shap_phi", s.shap_phi},
                     {"lime_weight", s.lime_weight},
                     {"agree", s.agree}});
  }
  return {{"k", r.k},
          {"shap_top", r.shap_top},
          {"lime_features", r.lime_features},
          {"shared", r.shared},
          {"overlap", r.overlap},
          {"signs", signs},
          {"sign_agreement_rate", detail::optional_number(r.sign_agreement_rate)}};
}

}  // namespace floodxai

#endif  // FLOODXAI_IO_HPP_
