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

// Train a logistic model on a rainfall CSV and explain one year with both
// Kernel SHAP and LIME.
//
//   explain_year rainfall.csv 1947

#include <cstdlib>
#include <iostream>

#include "floodxai/floodxai.hpp"

using namespace floodxai;

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: " << argv[0] << " rainfall.csv YEAR\n";
    return 2;
  }
  try {
    const Dataset data = impute_missing(load_csv(argv[1])).dataset;
    const RainfallRecord* row = data.find_year(std::atoi(argv[2]));
    if (!row) throw ValidationError(std::string("no year ") + argv[2] + " in the data");

    const SplitDataset parts = split(data, 0.7, 42);
    const LogisticModel model = train_logistic(parts.train);

    const ShapExplanation shap =
        kernel_shap(model, row->monthly_mm, {Background::from_dataset(parts.train), std::nullopt, 42});
    std::cout << "SHAP (base " << shap.base_value << ", output " << shap.model_output << ")\n"
              << text_two_sided_chart(shap_bars(shap, data.feature_names)) << '\n';

    const LimeExplanation lime = explain_local(model, row->monthly_mm, parts.train, LimeConfig{});
    std::cout << "LIME (fidelity " << lime.local_fidelity << ")\n"
              << text_two_sided_chart(lime_bars(lime));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
