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

#ifndef FLOODXAI_FLOODXAI_HPP_
#define FLOODXAI_FLOODXAI_HPP_

#include "floodxai/common.hpp"
#include "floodxai/dataset.hpp"
#include "floodxai/io.hpp"
#include "floodxai/lime.hpp"
#include "floodxai/metrics.hpp"
#include "floodxai/models.hpp"
#include "floodxai/render.hpp"
#include "floodxai/shap.hpp"

#endif  // FLOODXAI_FLOODXAI_HPP_
