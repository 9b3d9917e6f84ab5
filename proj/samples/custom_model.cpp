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

// Any type with `double predict_proba(FeatureView) const` can be explained.
// Here a hand-written monsoon rule is explained exactly and with sampled
// Kernel SHAP against a single all-zero reference year.

#include <iostream>

#include "floodxai/floodxai.hpp"

using namespace floodxai;

struct MonsoonRule {
  double predict_proba(FeatureView x) const {
    const double monsoon = x[5] + x[6] + x[7] + x[8];  // JUN..SEP
    return sigmoid((monsoon - 2200.0) / 150.0);
  }
};

static_assert(ProbabilityModel<MonsoonRule>);

int main() {
  const FeatureVector year{20, 15, 40, 120, 250, 700, 820, 600, 300, 280, 150, 30};
  const Background reference{{FeatureVector(12, 0.0)}};
  const MonsoonRule rule;

  const ShapExplanation exact = exact_shapley(rule, year, reference);
  const ShapExplanation sampled = kernel_shap(rule, year, {reference, 512, 7});

  const auto& names = month_names();
  for (std::size_t j = 0; j < 12; ++j) {
    std::cout << names[j] << "  exact " << exact.phi[j] << "  sampled " << sampled.phi[j] << '\n';
  }
  std::cout << "efficiency residual " << exact.additivity_residual << '\n';
  return 0;
}
