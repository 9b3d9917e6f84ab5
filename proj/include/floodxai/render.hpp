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

#ifndef FLOODXAI_RENDER_HPP_
#define FLOODXAI_RENDER_HPP_

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "floodxai/lime.hpp"
#include "floodxai/shap.hpp"

// Plain-text and static SVG bar charts for the reports.

namespace floodxai {

struct Bar {
  std::string label;
  double value = 0.0;
};

namespace detail {

inline std::string fixed(double v, int digits) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

// One bar per line, scaled so the largest magnitude spans `width` cells.
inline std::string text_bar_chart(std::span<const Bar> bars, int width = 50, int digits = 2) {
  std::size_t label_width = 0;
  double peak = 0.0;
  for (const auto& b : bars) {
    label_width = std::max(label_width, b.label.size());
    peak = std::max(peak, std::abs(b.value));
  }
  std::ostringstream out;
  for (const auto& b : bars) {
    const int cells = peak > 0.0 ? static_cast<int>(std::lround(std::abs(b.value) / peak * width)) : 0;
    out << std::left << std::setw(static_cast<int>(label_width)) << b.label << " | "
        << std::string(static_cast<std::size_t>(cells), '#') << ' '
        << detail::fixed(b.value, digits) << '\n';
  }
  return out.str();
}

// Negative values grow left of the axis, positive values right of it.
inline std::string text_two_sided_chart(std::span<const Bar> bars, int half_width = 25,
                                        int digits = 4) {
  std::size_t label_width = 0;
  double peak = 0.0;
  for (const auto& b : bars) {
    label_width = std::max(label_width, b.label.size());
    peak = std::max(peak, std::abs(b.value));
  }
  std::ostringstream out;
  out << std::string(label_width, ' ') << "  " << std::setw(half_width) << std::right
      << "no flood <" << '|' << "> flood" << '\n';
  for (const auto& b : bars) {
    const int cells =
        peak > 0.0 ? static_cast<int>(std::lround(std::abs(b.value) / peak * half_width)) : 0;
    const auto n = static_cast<std::size_t>(cells);
    std::string left(static_cast<std::size_t>(half_width), ' ');
    std::string right;
    if (b.value < 0) {
      left.replace(static_cast<std::size_t>(half_width) - n, n, std::string(n, '#'));
    } else {
      right = std::string(n, '#');
    }
    out << std::left << std::setw(static_cast<int>(label_width)) << b.label << "  " << left
        << '|' << right << ' ' << detail::fixed(b.value, digits) << '\n';
  }
  return out.str();
}

// Static horizontal bar chart; negative bars extend left of a centre axis
// when any value is negative.
inline std::string svg_bar_chart(std::span<const Bar> bars, const std::string& title) {
  const int row_height = 24;
  const int label_space = 190;
  const int plot_width = 420;
  const int top = 40;
  const int height = top + row_height * static_cast<int>(bars.size()) + 20;
  const int width = label_space + plot_width + 90;
  double peak = 0.0;
  bool has_negative = false;
  for (const auto& b : bars) {
    peak = std::max(peak, std::abs(b.value));
    has_negative = has_negative || b.value < 0.0;
  }
  const int axis = has_negative ? label_space + plot_width / 2 : label_space;
  const double span = has_negative ? plot_width / 2.0 : plot_width;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "  <text x=\"10\" y=\"20\" font-size=\"14\">" << detail::xml_escape(title)
      << "</text>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const int y = top + row_height * static_cast<int>(i);
    const double len = peak > 0.0 ? std::abs(b.value) / peak * span : 0.0;
    const double x = b.value < 0.0 ? axis - len : axis;
    out << "  <text x=\"" << label_space - 6 << "\" y=\"" << y + 15
        << "\" text-anchor=\"end\">" << detail::xml_escape(b.label) << "</text>\n";
    out << "  <rect x=\"" << detail::fixed(x, 2) << "\" y=\"" << y + 3 << "\" width=\""
        << detail::fixed(len, 2) << "\" height=\"" << row_height - 6 << "\" fill=\""
        << (b.value < 0.0 ? "#1f77b4" : "#d62728") << "\"/>\n";
    out << "  <text x=\"" << label_space + plot_width + 6 << "\" y=\"" << y + 15 << "\">"
        << detail::fixed(b.value, 4) << "</text>\n";
  }
  out << "  <line x1=\"" << axis << "\" y1=\"" << top << "\" x2=\"" << axis << "\" y2=\""
      << height - 20 << "\" stroke=\"black\"/>\n";
  out << "</svg>\n";
  return out.str();
}

inline std::vector<Bar> importance_bars(const GlobalImportance& g) {
  std::vector<Bar> bars;
  for (auto i : g.ranking) bars.push_back({g.feature_names[i], g.importance[i]});
  return bars;
}

inline std::vector<Bar> lime_bars(const LimeExplanation& e) {
  std::vector<Bar> bars;
  for (const auto& c : e.conditions) bars.push_back({c.condition, c.weight});
  return bars;
}

inline std::vector<Bar> shap_bars(const ShapExplanation& e, std::span<const std::string> names) {
  std::vector<Bar> bars;
  for (auto i : rank_descending([&] {
         FeatureVector mag;
         for (double p : e.phi) mag.push_back(std::abs(p));
         return mag;
       }())) {
    bars.push_back({names[i], e.phi[i]});
  }
  return bars;
}

}  // namespace floodxai

#endif  // FLOODXAI_RENDER_HPP_
