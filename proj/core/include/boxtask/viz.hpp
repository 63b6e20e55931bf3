/*
 * Copyright 2025 The boxtask Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "boxtask/data.hpp"

namespace boxtask {

enum class DrawOrder { kAreaDescending };

struct RenderSpec {
  double canvas = 800.0;                            // output width/height in px
  std::map<std::string, std::string> group_colors;  // "#rrggbb" per group
  bool labels = true;
  double opacity = 0.35;
  double stroke_width = 0.0;  // user units; 0 picks a scale-relative default
  DrawOrder draw_order = DrawOrder::kAreaDescending;

  void validate() const;
};

/// Renders 2D boxes as an SVG 1.1 document (rect/text/g elements only).
/// Larger boxes are drawn first so nested boxes stay visible; same-group
/// boxes share a color; the viewport fits all boxes with a 5% margin.
/// Boxes of higher dimension are rejected unless `dims` selects the two
/// coordinates to project onto. Output is byte-deterministic.
std::string render_svg(const std::vector<EmbeddedBox>& boxes, const RenderSpec& spec,
                       std::optional<std::pair<int, int>> dims = std::nullopt);

/// Same rendering with one task highlighted: the target box gets a distinct
/// fill, and every box that (in the full embedding space) contains the
/// target with directed overlap >= 0.9 is stroked bold.
std::string render_affinity_highlight(const std::vector<EmbeddedBox>& boxes,
                                      const std::string& target_id,
                                      const RenderSpec& spec,
                                      std::optional<std::pair<int, int>> dims = std::nullopt);

}  // namespace boxtask
