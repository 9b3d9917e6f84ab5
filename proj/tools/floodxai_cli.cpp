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

// floodxai command-line front end: summary, train, evaluate, explain.
//
// Exit codes: 0 success, 2 usage or validation error, 3 runtime failure.
// Report files are written only after every computation has succeeded, each
// through a temporary file that is renamed into place.

#include <openssl/evp.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "floodxai/floodxai.hpp"

namespace fs = std::filesystem;
using namespace floodxai;

#ifndef FLOODXAI_VERSION
#define FLOODXAI_VERSION "0.0.0"
#endif

namespace {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return "sha256:" + out;
}

// Option validators whose messages name the bound.
CLI::Validator bounded(double lo, bool inclusive) {
  std::ostringstream label;
  label << (inclusive ? ">= " : "> ") << lo;
  return CLI::Validator(
      [lo, inclusive, text = label.str()](std::string& s) -> std::string {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) return "expected a number, got '" + s + "'";
        return (inclusive ? v >= lo : v > lo) ? "" : "must be " + text + ", got " + s;
      },
      label.str());
}
CLI::Validator at_least(double lo) { return bounded(lo, true); }
CLI::Validator positive() { return bounded(0.0, false); }

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Files to publish once the command has finished without error.
class Outputs {
 public:
  void add(std::string path, std::string content) {
    if (!path.empty()) files_.emplace_back(std::move(path), std::move(content));
  }

  void commit() const {
    for (const auto& [path, content] : files_) {
      fs::path tmp = path;
      tmp += ".tmp-" + std::to_string(::getpid());
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) {
          std::error_code ec;
          fs::remove(tmp, ec);
          throw std::runtime_error("cannot write '" + path + "'");
        }
      }
      std::error_code ec;
      fs::rename(tmp, path, ec);
      if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error("cannot move report into place at '" + path + "'");
      }
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

struct LoadedData {
  Dataset dataset;
  std::vector<ImputedCell> imputed;
  std::vector<std::string> warnings;
  std::string fingerprint;
};

LoadedData load_data(const std::string& path, const std::string& label_column,
                     ImputeStrategy strategy) {
  const std::string bytes = read_bytes(path);
  CsvSchema schema;
  schema.label_column = label_column;
  LoadedData out;
  std::istringstream in(bytes);
  Dataset raw;
  try {
    raw = read_csv(in, schema, &out.warnings);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (raw.empty()) throw ValidationError(path + ": no data rows");
  auto imputed = impute_missing(raw, strategy);
  out.dataset = std::move(imputed.dataset);
  out.imputed = std::move(imputed.log);
  out.fingerprint = sha256_hex(bytes);
  return out;
}

Json manifest(const std::string& command, const std::string& fingerprint, Json seeds,
              Json hyperparameters, Json settings, const std::string& started) {
  return {{"command", command},
          {"tool_version", FLOODXAI_VERSION},
          {"dataset_fingerprint", fingerprint},
          {"seeds", std::move(seeds)},
          {"hyperparameters", std::move(hyperparameters)},
          {"settings", std::move(settings)},
          {"timestamps", {{"started", started}, {"finished", utc_now()}}}};
}

Json report(const std::string& kind, Json manifest, Json body) {
  Json j = {{"schema_version", kReportSchemaVersion}, {"report", kind}, {"manifest", manifest}};
  for (auto& [key, value] : body.items()) j[key] = value;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string year_range(const Dataset& d) {
  int lo = d.records.front().year, hi = lo;
  for (const auto& r : d.records) {
    lo = std::min(lo, r.year);
    hi = std::max(hi, r.year);
  }
  return std::to_string(lo) + "-" + std::to_string(hi);
}

const RainfallRecord& require_year(const Dataset& d, std::optional<int> year) {
  if (!year) throw ValidationError("--year is required for this mode (available " +
                                   year_range(d) + ")");
  const RainfallRecord* r = d.find_year(*year);
  if (!r) {
    throw ValidationError("--year " + std::to_string(*year) + " is not in the dataset (available " +
                          year_range(d) + ", " + std::to_string(d.size()) + " records)");
  }
  return *r;
}

ModelDocument load_model(const std::string& path) {
  const std::string text = read_bytes(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ValidationError(path + ": not valid JSON: " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

Json imputed_json(const std::vector<ImputedCell>& log) {
  Json out = Json::array();
  for (const auto& c : log) {
    out.push_back({{"year", c.year}, {"feature", c.feature}, {"value", c.value},
                   {"strategy", to_string(c.strategy)}});
  }
  return out;
}

// Recreates the training and evaluation partitions recorded in a model file.
struct ModelContext {
  ModelDocument doc;
  LoadedData data;
  SplitDataset parts;
};

ModelContext model_context(const std::string& model_path, const std::string& data_path,
                           std::optional<std::uint64_t> seed_override) {
  ModelContext ctx{load_model(model_path), {}, {}};
  const TrainingMetadata& meta = ctx.doc.training;
  ctx.data = load_data(data_path, meta.label_column, parse_impute_strategy(meta.impute));
  if (ctx.doc.feature_names != ctx.data.dataset.feature_names) {
    throw ValidationError(model_path + ": model features do not match the dataset columns");
  }
  if (!meta.dataset_fingerprint.empty() && meta.dataset_fingerprint != ctx.data.fingerprint) {
    std::cerr << "warning: " << data_path << " differs from the file " << model_path
              << " was trained on\n";
  }
  ctx.parts = split(ctx.data.dataset, meta.train_fraction, seed_override.value_or(meta.seed));
  return ctx;
}

std::vector<Bar> month_bars(const Dataset& d) {
  const FeatureVector means = monthly_means(d);
  std::vector<Bar> bars;
  for (std::size_t j = 0; j < means.size(); ++j) bars.push_back({d.feature_names[j], means[j]});
  return bars;
}

// ---------------------------------------------------------------- summary

struct SummaryArgs {
  std::string data;
  std::string label_column = "FLOODS";
  std::string impute = "column-mean";
  std::string json;
  std::string svg;
  std::string provenance;
};

int run_summary(const SummaryArgs& a) {
  const std::string started = utc_now();
  const LoadedData data = load_data(a.data, a.label_column, parse_impute_strategy(a.impute));
  const Dataset& d = data.dataset;
  std::size_t floods = 0;
  for (const auto& r : d.records) floods += static_cast<std::size_t>(r.flood);

  std::cout << "records: " << d.size() << " (" << year_range(d) << "), flood years: " << floods
            << "\n";
  for (const auto& w : data.warnings) std::cout << "warning: " << w << "\n";
  std::cout << "imputed cells: " << data.imputed.size() << "\n";
  if (!data.imputed.empty()) std::cout << format_provenance(data.imputed);
  const auto bars = month_bars(d);
  std::cout << "\nMean monthly rainfall (mm)\n" << text_bar_chart(bars, 50, 1);

  Outputs out;
  if (!a.json.empty()) {
    const Json body = {{"records", d.size()},
                       {"first_year", d.records.front().year},
                       {"last_year", d.records.back().year},
                       {"flood_years", floods},
                       {"feature_names", d.feature_names},
                       {"monthly_means_mm", monthly_means(d)},
                       {"imputed_cells", imputed_json(data.imputed)},
                       {"warnings", data.warnings}};
    const Json settings = {{"label_column", a.label_column}, {"impute", a.impute}};
    out.add(a.json, dump(report("summary",
                                manifest("summary", data.fingerprint, Json::object(),
                                         Json::object(), settings, started),
                                body)));
  }
  out.add(a.svg, svg_bar_chart(bars, "Mean monthly rainfall (mm)"));
  out.add(a.provenance, format_provenance(data.imputed));
  out.commit();
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string model;
  std::uint64_t seed = 42;
  double split = 0.7;
  std::string out;
  std::string json;
  std::string label_column = "FLOODS";
  std::string impute = "column-mean";
  int k = 5;
  int max_depth = 5;
  int min_samples_leaf = 2;
  double c = 1.0;
  std::optional<double> lr;
  std::optional<int> epochs;
  double l2 = 1e-4;
};

int run_train(const TrainArgs& a) {
  const std::string started = utc_now();
  const ModelKind kind = parse_model_kind(a.model);
  if (!(a.split > 0.0 && a.split < 1.0)) throw ValidationError("--split must lie in (0, 1)");
  Hyperparameters hp;
  hp.k = a.k;
  hp.tree = {a.max_depth, a.min_samples_leaf};
  hp.logistic.l2 = a.l2;
  hp.svm.c = a.c;
  if (a.lr) {
    hp.logistic.learning_rate = *a.lr;
    hp.svm.learning_rate = *a.lr;
  }
  if (a.epochs) {
    hp.logistic.epochs = *a.epochs;
    hp.svm.epochs = *a.epochs;
  }

  const LoadedData data = load_data(a.data, a.label_column, parse_impute_strategy(a.impute));
  const SplitDataset parts = split(data.dataset, a.split, a.seed);
  if (kind == ModelKind::kKnn && static_cast<std::size_t>(a.k) > parts.train.size()) {
    throw ValidationError("--k " + std::to_string(a.k) + " exceeds the " +
                          std::to_string(parts.train.size()) + " training rows");
  }
  TrainingMetadata meta{a.seed, a.split, to_string(parse_impute_strategy(a.impute)),
                        a.label_column, data.fingerprint, parts.train.size()};
  const ModelDocument doc{train_model(kind, parts.train, hp), data.dataset.feature_names, meta};
  const MetricsReport fit = evaluate(doc.model, parts.train, display_name(kind), "train");

  const Json settings = {{"label_column", a.label_column},
                         {"impute", meta.impute},
                         {"split", a.split},
                         {"model", to_string(kind)}};
  const Json m = manifest("train", data.fingerprint, {{"split", a.seed}},
                          {{"kind", to_string(kind)}, {"values", hyperparameters_json(doc.model)}},
                          settings, started);
  Json model_json = to_json(doc);
  model_json["manifest"] = m;

  std::cout << "trained " << display_name(kind) << " on " << parts.train.size() << " of "
            << data.dataset.size() << " rows (seed " << a.seed << ", split " << a.split << ")\n";
  const std::vector<MetricsReport> reports{fit};
  std::cout << format_metrics_table(reports);

  Outputs out;
  out.add(a.out, dump(model_json));
  if (!a.json.empty()) {
    const Json body = {{"model_kind", to_string(kind)},
                       {"train_rows", parts.train.size()},
                       {"test_rows", parts.test.size()},
                       {"training_metrics", to_json(fit)}};
    out.add(a.json, dump(report("train", m, body)));
  }
  out.commit();
  std::cout << "model written to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string data;
  std::vector<std::string> models;
  std::optional<std::uint64_t> seed;
  std::string partition = "test";
  std::string json;
};

int run_evaluate(const EvaluateArgs& a) {
  const std::string started = utc_now();
  if (a.partition != "test" && a.partition != "train") {
    throw ValidationError("--partition must be 'test' or 'train'");
  }
  std::vector<MetricsReport> reports;
  Json seeds = Json::array();
  Json hyper = Json::array();
  Json models = Json::array();
  std::string fingerprint;
  for (const auto& path : a.models) {
    const ModelContext ctx = model_context(path, a.data, a.seed);
    const Dataset& part = a.partition == "test" ? ctx.parts.test : ctx.parts.train;
    reports.push_back(evaluate(ctx.doc.model, part, display_name(ctx.doc.model.kind()), a.partition));
    fingerprint = ctx.data.fingerprint;
    seeds.push_back(ctx.parts.seed);
    hyper.push_back({{"kind", to_string(ctx.doc.model.kind())},
                     {"values", hyperparameters_json(ctx.doc.model)}});
    Json r = to_json(reports.back());
    r["kind"] = to_string(ctx.doc.model.kind());
    r["rows"] = part.size();
    r["split_seed"] = ctx.parts.seed;
    r["train_fraction"] = ctx.parts.train_fraction;
    models.push_back(r);
  }
  std::cout << format_metrics_table(reports);

  Outputs out;
  if (!a.json.empty()) {
    const Json settings = {{"partition", a.partition}};
    out.add(a.json, dump(report("evaluate",
                                manifest("evaluate", fingerprint, {{"split", seeds}}, hyper,
                                         settings, started),
                                {{"partition", a.partition}, {"models", models}})));
  }
  out.commit();
  return 0;
}

// ---------------------------------------------------------------- explain

struct ExplainArgs {
  std::string data;
  std::string model;
  std::string mode;
  std::optional<int> year;
  std::uint64_t seed = 42;
  std::string json;
  std::string svg;
  std::string background = "trainset";
  std::string samples = "exhaustive";
  std::size_t bins = 4;
  std::optional<double> kernel_width;
  std::size_t top_features = 6;
  std::size_t perturbations = 2000;
  std::size_t shap_top = 5;
};

std::optional<std::size_t> parse_samples(const std::string& text, std::size_t m) {
  if (text == "exhaustive") return std::nullopt;
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("--samples must be a positive integer or 'exhaustive' (got '" + text +
                          "')");
  }
  if (value < min_kernel_samples(m)) {
    throw ValidationError("--samples " + text + " is below the minimum " +
                          std::to_string(min_kernel_samples(m)) + " for " + std::to_string(m) +
                          " features");
  }
  return value;
}

int run_explain(const ExplainArgs& a) {
  const std::string started = utc_now();
  if (a.mode != "global-shap" && a.mode != "local-shap" && a.mode != "local-lime" &&
      a.mode != "compare") {
    throw ValidationError("--mode must be one of global-shap, local-shap, local-lime, compare");
  }
  if (a.background != "trainset" && a.background != "mean") {
    throw ValidationError("--background must be 'trainset' or 'mean'");
  }
  const ModelContext ctx = model_context(a.model, a.data, std::nullopt);
  const Dataset& all = ctx.data.dataset;
  const Dataset& train = ctx.parts.train;
  const TrainedModel& model = ctx.doc.model;
  const std::size_t m = all.num_features();
  const auto& names = all.feature_names;

  const bool uses_shap = a.mode != "local-lime";
  const bool uses_lime = a.mode == "local-lime" || a.mode == "compare";
  const RainfallRecord* row = a.mode == "global-shap" ? nullptr : &require_year(all, a.year);

  ShapConfig shap;
  LimeConfig lime;
  Json settings = {{"mode", a.mode}};
  if (a.year) settings["year"] = *a.year;
  if (uses_shap) {
    shap.background = a.background == "mean" ? Background::mean_of(train)
                                             : Background::from_dataset(train);
    shap.n_coalition_samples = parse_samples(a.samples, m);
    shap.seed = a.seed;
    settings["shap"] = {{"background", a.background},
                        {"background_rows", shap.background.rows.size()},
                        {"background_fingerprint", sha256_hex(Json(shap.background.rows).dump())},
                        {"samples", shap.n_coalition_samples ? Json(*shap.n_coalition_samples)
                                                             : Json("exhaustive")},
                        {"seed", a.seed}};
  }
  if (uses_lime) {
    lime.n_perturbations = a.perturbations;
    lime.kernel_width = a.kernel_width;
    lime.n_selected_features = a.top_features;
    lime.n_bins = a.bins;
    lime.seed = a.seed;
    lime.validate(m);
    settings["lime"] = {{"perturbations", lime.n_perturbations},
                        {"kernel_width", lime.kernel_width_for(m)},
                        {"top_features", lime.n_selected_features},
                        {"bins", lime.n_bins},
                        {"sampling", "uniform-in-bin"},
                        {"ridge", lime.ridge},
                        {"seed", a.seed}};
  }

  Json body = {{"mode", a.mode}, {"model_kind", to_string(model.kind())}};
  std::vector<Bar> svg_bars;
  std::string svg_title;
  std::ostringstream text;

  std::optional<GlobalImportance> global;
  if (a.mode == "global-shap" || a.mode == "compare") {
    global = global_importance(model, all, shap);
    body["global"] = to_json(*global);
    const auto bars = importance_bars(*global);
    text << "Global SHAP importance, mean |phi| over " << global->instances << " years ("
         << display_name(model.kind()) << ")\n"
         << text_bar_chart(bars, 50, 4);
    svg_bars = bars;
    svg_title = "Global SHAP importance (" + display_name(model.kind()) + ")";
  }

  std::optional<ShapExplanation> local;
  if (a.mode == "local-shap" || a.mode == "compare") {
    local = kernel_shap(model, row->monthly_mm, shap);
    body["local_shap"] = to_json(*local, names);
    body["year"] = row->year;
    body["flood"] = row->flood;
    if (a.mode == "local-shap") {
      const auto bars = shap_bars(*local, names);
      text << "SHAP explanation for " << row->year << " (" << display_name(model.kind())
           << "): base " << std::fixed << std::setprecision(4) << local->base_value << ", output "
           << local->model_output << ", residual " << std::scientific << std::setprecision(2)
           << local->additivity_residual << std::defaultfloat << "\n"
           << text_two_sided_chart(bars);
      svg_bars = bars;
      svg_title = "SHAP values for " + std::to_string(row->year);
    }
  }

  std::optional<LimeExplanation> lime_e;
  if (uses_lime) {
    lime_e = explain_local(model, row->monthly_mm, LimeContext::fit(train, lime), lime);
    body["lime"] = to_json(*lime_e);
    body["year"] = row->year;
    body["flood"] = row->flood;
    const auto bars = lime_bars(*lime_e);
    text << (text.tellp() > 0 ? "\n" : "") << "LIME explanation for " << row->year << ": predicted "
         << (lime_e->predicted_class ? "flood" : "no flood") << " (p = " << std::fixed
         << std::setprecision(4) << lime_e->predicted_proba << "), local fidelity R^2 "
         << lime_e->local_fidelity << std::defaultfloat << "\n"
         << text_two_sided_chart(bars);
    if (a.mode == "local-lime") {
      svg_bars = bars;
      svg_title = "LIME explanation for " + std::to_string(row->year);
    }
  }

  if (a.mode == "compare") {
    const AgreementReport agreement = compare_explanations(*global, *lime_e, a.shap_top, &*local);
    body["agreement"] = to_json(agreement);
    text << "\nSHAP top " << agreement.k << ":";
    for (const auto& n : agreement.shap_top) text << ' ' << n;
    text << "\nLIME features:";
    for (const auto& n : agreement.lime_features) text << ' ' << n;
    text << "\noverlap " << std::fixed << std::setprecision(2) << agreement.overlap;
    if (agreement.sign_agreement_rate) {
      text << ", sign agreement with local SHAP " << *agreement.sign_agreement_rate;
    }
    text << std::defaultfloat << "\n";
  }
  std::cout << text.str();

  Outputs out;
  if (!a.json.empty()) {
    Json hyper = {{"kind", to_string(model.kind())}, {"values", hyperparameters_json(model)}};
    out.add(a.json, dump(report("explain",
                                manifest("explain", ctx.data.fingerprint,
                                         {{"split", ctx.parts.seed}, {"explain", a.seed}}, hyper,
                                         settings, started),
                                body)));
  }
  if (!a.svg.empty()) out.add(a.svg, svg_bar_chart(svg_bars, svg_title));
  out.commit();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flood prediction from monthly rainfall with SHAP and LIME explanations",
               "floodxai"};
  app.set_version_flag("--version", FLOODXAI_VERSION);
  app.require_subcommand(1);

  SummaryArgs sa;
  auto* summary = app.add_subcommand("summary", "Load, impute and summarize a rainfall CSV");
  summary->add_option("--data", sa.data, "Rainfall CSV")->required();
  summary->add_option("--label-column", sa.label_column, "Flood label column");
  summary->add_option("--impute", sa.impute, "column-mean or zero");
  summary->add_option("--json", sa.json, "Write the JSON report here");
  summary->add_option("--svg", sa.svg, "Write an SVG bar chart of monthly means here");
  summary->add_option("--provenance", sa.provenance, "Write the imputed-cell log here");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train one classifier and save it as JSON");
  train->add_option("--data", ta.data, "Rainfall CSV")->required();
  train->add_option("--model", ta.model, "logistic, knn, tree or svm")->required();
  train->add_option("--out", ta.out, "Model file to write")->required();
  train->add_option("--seed", ta.seed, "Split seed")->capture_default_str();
  train->add_option("--split", ta.split, "Training fraction")->capture_default_str();
  train->add_option("--json", ta.json, "Write the JSON report here");
  train->add_option("--label-column", ta.label_column, "Flood label column");
  train->add_option("--impute", ta.impute, "column-mean or zero");
  train->add_option("--k", ta.k, "KNN neighbours")->check(at_least(1));
  train->add_option("--max-depth", ta.max_depth, "Tree depth limit")->check(at_least(1));
  train->add_option("--min-samples-leaf", ta.min_samples_leaf, "Tree leaf size")
      ->check(at_least(1));
  train->add_option("--c", ta.c, "SVM regularization C")->check(positive());
  train->add_option("--lr", ta.lr, "Learning rate (logistic, svm)")->check(positive());
  train->add_option("--epochs", ta.epochs, "Epochs (logistic, svm)")->check(at_least(1));
  train->add_option("--l2", ta.l2, "Logistic L2 penalty")->check(at_least(0));

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "Score saved models on the recreated split");
  eval->add_option("--data", ea.data, "Rainfall CSV")->required();
  eval->add_option("--model", ea.models, "Model file (repeatable)")->required();
  eval->add_option("--seed", ea.seed, "Override the split seed stored in the model");
  eval->add_option("--partition", ea.partition, "test or train");
  eval->add_option("--json", ea.json, "Write the JSON report here");

  ExplainArgs xa;
  auto* explain = app.add_subcommand("explain", "Explain a saved model with SHAP or LIME");
  explain->add_option("--data", xa.data, "Rainfall CSV")->required();
  explain->add_option("--model", xa.model, "Model file")->required();
  explain->add_option("--mode", xa.mode, "global-shap, local-shap, local-lime or compare")
      ->required();
  explain->add_option("--year", xa.year, "Year to explain (local modes)");
  explain->add_option("--seed", xa.seed, "Explainer seed")->capture_default_str();
  explain->add_option("--json", xa.json, "Write the JSON report here");
  explain->add_option("--svg", xa.svg, "Write an SVG bar chart here");
  explain->add_option("--background", xa.background, "trainset or mean")->capture_default_str();
  explain->add_option("--samples", xa.samples, "Coalition budget or 'exhaustive'")
      ->capture_default_str();
  explain->add_option("--bins", xa.bins, "LIME quantile bins")->check(at_least(2));
  explain->add_option("--kernel-width", xa.kernel_width, "LIME proximity kernel width")
      ->check(positive());
  explain->add_option("--top-features", xa.top_features, "LIME features to select")
      ->check(at_least(1));
  explain->add_option("--perturbations", xa.perturbations, "LIME samples")
      ->check(at_least(1));
  explain->add_option("--shap-top", xa.shap_top, "SHAP features compared against LIME")
      ->check(at_least(1));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*summary) return run_summary(sa);
    if (*train) return run_train(ta);
    if (*eval) return run_evaluate(ea);
    if (*explain) return run_explain(xa);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
