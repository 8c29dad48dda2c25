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

#pragma once

#include <string>
#include <vector>

#include "socdiff/geometry.hpp"
#include "socdiff/world.hpp"

namespace socdiff {

/// A labeled value series for charts.
struct Series {
  std::string label;
  std::vector<Scalar> values;
};

/// Scene render: obstacles, workspace frame, optional start/goal markers,
/// and trajectories as polylines (end-effector path for arms, with the
/// linkage drawn at the first and last waypoint). Deterministic text.
std::string render_scene(const Scene& scene, const RobotModel& robot,
                         const Problem* problem,
                         const std::vector<Trajectory>& trajectories,
                         int width_px = 480);

/// One histogram panel per series over a shared [lo, hi] range; used for
/// per-scene-type trigger-step distributions.
std::string render_histograms(const std::string& title,
                              const std::vector<Series>& series, int bins,
                              Scalar lo, Scalar hi, int width_px = 560);

/// Line chart of series sampled at shared x positions; used for raw vs
/// smoothed uniformity curves over denoising steps.
std::string render_lines(const std::string& title,
                         const std::vector<Scalar>& x,
                         const std::vector<Series>& series,
                         const std::string& x_label,
                         int width_px = 560, int height_px = 320);

}  // namespace socdiff
