// Copyright 2026 The socdiff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "socdiff/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace socdiff {

namespace {

constexpr const char* kPalette[] = {"#3b6ea5", "#c45a3b", "#4c9f70",
                                    "#8e5ba6", "#b0873c", "#5a5f66"};
constexpr int kPaletteSize = 6;

std::string px(Scalar v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Affine map from a world window to a pixel viewport (y flipped).
struct Frame {
  Scalar x0, y0, x1, y1;  // world window
  Scalar px0, py0, pw, ph;

  Scalar X(Scalar x) const { return px0 + (x - x0) / (x1 - x0) * pw; }
  Scalar Y(Scalar y) const { return py0 + (y1 - y) / (y1 - y0) * ph; }
};

void open_svg(std::ostringstream& out, int w, int h) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
      << "\">\n<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"#ffffff\"/>\n";
}

void text(std::ostringstream& out, Scalar x, Scalar y, const std::string& s,
          int size, const char* anchor = "start", const char* fill = "#333") {
  out << "<text x=\"" << px(x) << "\" y=\"" << px(y) << "\" font-size=\""
      << size << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor
      << "\" fill=\"" << fill << "\">" << esc(s) << "</text>\n";
}

std::string tick_label(Scalar v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

void polyline(std::ostringstream& out, const std::vector<Scalar>& xs,
              const std::vector<Scalar>& ys, const char* color,
              Scalar width) {
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
      << px(width) << "\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out << ' ';
    out << px(xs[i]) << ',' << px(ys[i]);
  }
  out << "\"/>\n";
}

}  // namespace

std::string render_scene(const Scene& scene, const RobotModel& robot,
                         const Problem* problem,
                         const std::vector<Trajectory>& trajectories,
                         int width_px) {
  if (width_px < 100) throw std::invalid_argument("render_scene: too narrow");
  const Scalar margin = 20;
  const Scalar span_x = scene.bounds.max.x() - scene.bounds.min.x();
  const Scalar span_y = scene.bounds.max.y() - scene.bounds.min.y();
  const Scalar inner_w = width_px - 2 * margin;
  const Scalar inner_h = inner_w * span_y / span_x;
  const int height_px = static_cast<int>(inner_h + 2 * margin);
  const Frame f{scene.bounds.min.x(), scene.bounds.min.y(),
                scene.bounds.max.x(), scene.bounds.max.y(),
                margin, margin, inner_w, inner_h};

  std::ostringstream out;
  open_svg(out, width_px, height_px);

  out << "<rect x=\"" << px(f.X(f.x0)) << "\" y=\"" << px(f.Y(f.y1))
      << "\" width=\"" << px(inner_w) << "\" height=\"" << px(inner_h)
      << "\" fill=\"#fafafa\" stroke=\"#888\"/>\n";

  for (const Aabb& o : scene.obstacles) {
    out << "<rect x=\"" << px(f.X(o.min.x())) << "\" y=\"" << px(f.Y(o.max.y()))
        << "\" width=\"" << px((o.max.x() - o.min.x()) / span_x * inner_w)
        << "\" height=\"" << px((o.max.y() - o.min.y()) / span_y * inner_h)
        << "\" fill=\"#b8bdc4\" stroke=\"#6b717a\"/>\n";
  }

  const auto workspace_path = [&](const Trajectory& tau) {
    std::vector<Scalar> xs, ys;
    for (Index l = 0; l < tau.rows(); ++l) {
      const Vec2 pt = forward_kinematics(robot, tau.row(l).transpose()).back();
      xs.push_back(f.X(pt.x()));
      ys.push_back(f.Y(pt.y()));
    }
    return std::make_pair(xs, ys);
  };

  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto [xs, ys] = workspace_path(trajectories[i]);
    polyline(out, xs, ys, kPalette[i % kPaletteSize], 1.6);
    if (robot.kind == RobotKind::PlanarArm && trajectories[i].rows() > 0) {
      // Linkage at the first and last configuration.
      for (Index l : {Index{0}, trajectories[i].rows() - 1}) {
        const auto pts = forward_kinematics(
            robot, trajectories[i].row(l).transpose());
        std::vector<Scalar> lx, ly;
        for (const Vec2& pt : pts) {
          lx.push_back(f.X(pt.x()));
          ly.push_back(f.Y(pt.y()));
        }
        polyline(out, lx, ly, "#777777", 1.0);
      }
    }
  }

  if (problem != nullptr) {
    const Vec2 s = forward_kinematics(robot, problem->q_start).back();
    const Vec2 g = forward_kinematics(robot, problem->q_goal).back();
    out << "<circle cx=\"" << px(f.X(s.x())) << "\" cy=\"" << px(f.Y(s.y()))
        << "\" r=\"4\" fill=\"#2d7a2d\"/>\n";
    out << "<circle cx=\"" << px(f.X(g.x())) << "\" cy=\"" << px(f.Y(g.y()))
        << "\" r=\"4\" fill=\"#b03030\"/>\n";
  }

  out << "</svg>\n";
  return out.str();
}

std::string render_histograms(const std::string& title,
                              const std::vector<Series>& series, int bins,
                              Scalar lo, Scalar hi, int width_px) {
  if (series.empty())
    throw std::invalid_argument("render_histograms: no series");
  if (bins < 1 || !(hi > lo))
    throw std::invalid_argument("render_histograms: bad bin range");

  const Scalar margin = 42;
  const Scalar panel_h = 96;
  const Scalar panel_gap = 26;
  const Scalar inner_w = width_px - 2 * margin;
  const int height_px = static_cast<int>(
      margin + series.size() * (panel_h + panel_gap) + 12);

  std::ostringstream out;
  open_svg(out, width_px, height_px);
  text(out, margin, 22, title, 14);

  for (std::size_t s = 0; s < series.size(); ++s) {
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    int total = 0;
    for (Scalar v : series[s].values) {
      if (v < lo || v > hi) continue;
      int b = static_cast<int>((v - lo) / (hi - lo) * bins);
      b = std::clamp(b, 0, bins - 1);
      ++counts[static_cast<std::size_t>(b)];
      ++total;
    }
    const int peak = std::max(1, *std::max_element(counts.begin(),
                                                   counts.end()));
    const Scalar top = margin + s * (panel_h + panel_gap);
    const Scalar base = top + panel_h;
    const char* color = kPalette[s % kPaletteSize];

    text(out, margin, top - 5,
         series[s].label + " (n=" + std::to_string(total) + ")", 11);
    out << "<line x1=\"" << px(margin) << "\" y1=\"" << px(base) << "\" x2=\""
        << px(margin + inner_w) << "\" y2=\"" << px(base)
        << "\" stroke=\"#888\"/>\n";

    const Scalar bar_w = inner_w / bins;
    for (int b = 0; b < bins; ++b) {
      const int c = counts[static_cast<std::size_t>(b)];
      if (c == 0) continue;
      const Scalar h = panel_h * static_cast<Scalar>(c) / peak;
      out << "<rect x=\"" << px(margin + b * bar_w) << "\" y=\""
          << px(base - h) << "\" width=\"" << px(bar_w * 0.9)
          << "\" height=\"" << px(h) << "\" fill=\"" << color << "\"/>\n";
    }
    text(out, margin, base + 12, tick_label(lo), 10);
    text(out, margin + inner_w, base + 12, tick_label(hi), 10, "end");
  }

  out << "</svg>\n";
  return out.str();
}

std::string render_lines(const std::string& title,
                         const std::vector<Scalar>& x,
                         const std::vector<Series>& series,
                         const std::string& x_label, int width_px,
                         int height_px) {
  if (series.empty()) throw std::invalid_argument("render_lines: no series");
  if (x.size() < 2) throw std::invalid_argument("render_lines: need >= 2 xs");
  for (const Series& s : series) {
    if (s.values.size() != x.size())
      throw std::invalid_argument("render_lines: series length mismatch");
  }

  Scalar ymin = std::numeric_limits<Scalar>::infinity();
  Scalar ymax = -ymin;
  for (const Series& s : series) {
    for (Scalar v : s.values) {
      if (std::isnan(v)) continue;
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (ymin > ymax) ymin = 0;  // all-NaN input
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const Scalar xmin = *std::min_element(x.begin(), x.end());
  const Scalar xmax = *std::max_element(x.begin(), x.end());

  const Scalar margin = 46;
  const Scalar inner_w = width_px - 2 * margin;
  const Scalar inner_h = height_px - 2 * margin;
  const Frame f{xmin, ymin, xmax, ymax, margin, margin, inner_w, inner_h};

  std::ostringstream out;
  open_svg(out, width_px, height_px);
  text(out, margin, 22, title, 14);

  out << "<rect x=\"" << px(margin) << "\" y=\"" << px(margin)
      << "\" width=\"" << px(inner_w) << "\" height=\"" << px(inner_h)
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  text(out, margin - 4, f.Y(ymin) + 4, tick_label(ymin), 10, "end");
  text(out, margin - 4, f.Y(ymax) + 4, tick_label(ymax), 10, "end");
  text(out, f.X(xmin), height_px - margin + 14, tick_label(xmin), 10,
       "middle");
  text(out, f.X(xmax), height_px - margin + 14, tick_label(xmax), 10,
       "middle");
  text(out, margin + inner_w / 2, height_px - margin + 28, x_label, 11,
       "middle");

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    std::vector<Scalar> xs, ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::isnan(series[s].values[i])) continue;
      xs.push_back(f.X(x[i]));
      ys.push_back(f.Y(series[s].values[i]));
    }
    if (!xs.empty()) polyline(out, xs, ys, color, 1.5);
    text(out, margin + 8 + 110 * static_cast<Scalar>(s), margin + 14,
         series[s].label, 11, "start", color);
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace socdiff
