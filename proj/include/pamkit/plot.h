/*
 * Copyright 2026 The pamkit Authors
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

#ifndef PAMKIT_PLOT_H_
#define PAMKIT_PLOT_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pamkit {

// Static SVG charts. Output is a pure function of the input, so reruns are
// byte-identical.

struct ScatterPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  // Printed in the corner when present.
  std::optional<double> pcc;
};

// Points plus the least-squares line of y on x (omitted when x is constant).
std::string RenderScatterSvg(const ScatterPlot& plot);

struct LineSeries {
  std::string name;
  std::string x_label;
  std::vector<double> x;  // drawn in the given order
  std::vector<double> y;
};

// One panel per series, stacked vertically in a single SVG, all sharing the
// y axis label.
std::string RenderLinePanelsSvg(const std::string& title,
                                const std::string& y_label,
                                std::span<const LineSeries> series);

void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace pamkit

#endif  // PAMKIT_PLOT_H_
