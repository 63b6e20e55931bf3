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

#include "boxtask/viz.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "boxtask/errors.hpp"
#include "boxtask/textio.hpp"

namespace boxtask {
namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr const char* kNoGroupColor = "#808080";
constexpr const char* kHighlightColor = "#e41a1c";

bool valid_hex_color(const std::string& c) {
  if (c.size() != 7 || c[0] != '#') return false;
  return std::all_of(c.begin() + 1, c.end(),
                     [](unsigned char ch) { return std::isxdigit(ch) != 0; });
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Rect2D {
  std::string id;
  std::optional<std::string> group;
  double x, y, w, h;
  double area() const { return w * h; }
};

std::vector<Rect2D> project(const std::vector<EmbeddedBox>& boxes,
                            std::optional<std::pair<int, int>> dims) {
  if (boxes.empty()) throw DataError("render: no boxes");
  const int k = boxes.front().box.dim();
  int dx = 0, dy = 1;
  if (k != 2) {
    if (!dims) {
      throw DataError("render: boxes have dimension " + std::to_string(k) +
                      "; pass an explicit two-dimension projection (--dims a,b)");
    }
  }
  if (dims) {
    dx = dims->first;
    dy = dims->second;
  }
  std::vector<Rect2D> rects;
  for (const EmbeddedBox& b : boxes) {
    if (b.box.dim() != k) throw DataError("render: mixed box dimensions");
    if (dx < 0 || dy < 0 || dx >= k || dy >= k || dx == dy) {
      throw DataError("render: projection dims must be two distinct axes in [0," +
                      std::to_string(k - 1) + "]");
    }
    rects.push_back(Rect2D{b.id, b.group, b.box.min[dx], b.box.min[dy], b.box.size[dx],
                           b.box.size[dy]});
  }
  return rects;
}

std::map<std::string, std::string> assign_colors(const std::vector<Rect2D>& rects,
                                                 const RenderSpec& spec) {
  std::set<std::string> groups;
  for (const Rect2D& r : rects) {
    if (r.group) groups.insert(*r.group);
  }
  std::map<std::string, std::string> colors = spec.group_colors;
  std::size_t next = 0;
  for (const std::string& g : groups) {
    if (colors.find(g) == colors.end()) {
      colors[g] = kPalette[next % (sizeof(kPalette) / sizeof(kPalette[0]))];
      ++next;
    }
  }
  return colors;
}

// Model coordinates are emitted verbatim into the viewBox (the SVG y axis
// points down; containment relationships are mirror-invariant).
std::string render_impl(const std::vector<EmbeddedBox>& boxes, const RenderSpec& spec,
                        std::optional<std::pair<int, int>> dims,
                        const std::string* highlight_id,
                        const std::vector<bool>* bold) {
  spec.validate();
  std::vector<Rect2D> rects = project(boxes, dims);

  double xmin = rects[0].x, ymin = rects[0].y;
  double xmax = rects[0].x + rects[0].w, ymax = rects[0].y + rects[0].h;
  for (const Rect2D& r : rects) {
    xmin = std::min(xmin, r.x);
    ymin = std::min(ymin, r.y);
    xmax = std::max(xmax, r.x + r.w);
    ymax = std::max(ymax, r.y + r.h);
  }
  const double extent = std::max(xmax - xmin, ymax - ymin);
  const double margin = 0.05 * extent;
  const double stroke =
      spec.stroke_width > 0.0 ? spec.stroke_width : 0.003 * extent;

  // Larger boxes first so nested boxes stay visible; ties break on id to
  // keep the byte stream deterministic.
  std::vector<std::size_t> order(rects.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rects[a].area() != rects[b].area()) return rects[a].area() > rects[b].area();
    return rects[a].id < rects[b].id;
  });

  const auto colors = assign_colors(rects, spec);
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << format_double(spec.canvas) << "\" height=\"" << format_double(spec.canvas)
      << "\" viewBox=\"" << format_double(xmin - margin) << ' '
      << format_double(ymin - margin) << ' ' << format_double(xmax - xmin + 2 * margin)
      << ' ' << format_double(ymax - ymin + 2 * margin) << "\">\n";
  svg << "<g>\n";
  for (std::size_t i : order) {
    const Rect2D& r = rects[i];
    const bool is_target = highlight_id != nullptr && r.id == *highlight_id;
    std::string fill = kNoGroupColor;
    if (is_target) {
      fill = kHighlightColor;
    } else if (r.group) {
      fill = colors.at(*r.group);
    }
    const bool bold_stroke = bold != nullptr && (*bold)[i];
    svg << "<rect x=\"" << format_double(r.x) << "\" y=\"" << format_double(r.y)
        << "\" width=\"" << format_double(r.w) << "\" height=\"" << format_double(r.h)
        << "\" fill=\"" << fill << "\" fill-opacity=\""
        << format_double(is_target ? std::min(1.0, spec.opacity * 2.0) : spec.opacity)
        << "\" stroke=\"#333333\" stroke-width=\""
        << format_double(bold_stroke ? 3.0 * stroke : stroke) << "\"/>\n";
  }
  if (spec.labels) {
    const double font = 0.025 * extent;
    for (std::size_t i : order) {
      const Rect2D& r = rects[i];
      svg << "<text x=\"" << format_double(r.x + 0.01 * extent) << "\" y=\""
          << format_double(r.y + font) << "\" font-size=\"" << format_double(font)
          << "\">" << xml_escape(r.id) << "</text>\n";
    }
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace

void RenderSpec::validate() const {
  if (!(canvas > 0.0)) throw std::invalid_argument("RenderSpec: canvas must be > 0");
  if (!(opacity > 0.0 && opacity <= 1.0)) {
    throw std::invalid_argument("RenderSpec: opacity must be in (0,1]");
  }
  if (stroke_width < 0.0) {
    throw std::invalid_argument("RenderSpec: stroke width must be >= 0");
  }
  for (const auto& [group, color] : group_colors) {
    if (!valid_hex_color(color)) {
      throw std::invalid_argument("RenderSpec: color for group \"" + group +
                                  "\" must be #rrggbb");
    }
  }
}

std::string render_svg(const std::vector<EmbeddedBox>& boxes, const RenderSpec& spec,
                       std::optional<std::pair<int, int>> dims) {
  return render_impl(boxes, spec, dims, nullptr, nullptr);
}

std::string render_affinity_highlight(const std::vector<EmbeddedBox>& boxes,
                                      const std::string& target_id,
                                      const RenderSpec& spec,
                                      std::optional<std::pair<int, int>> dims) {
  std::size_t target = boxes.size();
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (boxes[i].id == target_id) {
      target = i;
      break;
    }
  }
  if (target == boxes.size()) {
    throw DataError("render: unknown target id \"" + target_id + "\"");
  }
  // Containers are decided in the full embedding space, not the projection.
  Temperatures temps;
  std::vector<bool> bold(boxes.size(), false);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (i == target) continue;
    bold[i] = overlap_fraction(boxes[target].box, boxes[i].box, temps,
                               OverlapMode::kHard) >= 0.9;
  }
  return render_impl(boxes, spec, dims, &target_id, &bold);
}

}  // namespace boxtask
