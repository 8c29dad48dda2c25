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

#include <array>

#include "socdiff/types.hpp"
#include "socdiff/world.hpp"

namespace socdiff {

inline constexpr Scalar kDefaultSmoothingEps = 1e-4;  // m^2

/// Parameters of the twelve-member cost family: five intersection-volume
/// terms evaluated at waypoints and seven swept-volume terms evaluated at
/// interpolated configurations between waypoints. Distinct margins and
/// temporal resolutions make the terms disagree on grazing contacts, which
/// is what lets the sum catch collisions any single term misses.
struct CostParams {
  std::array<Scalar, 5> iv_margins{0.0, 0.02, 0.05, 0.08, 0.12};
  std::array<Scalar, 7> sv_margins{0.0, 0.0, 0.02, 0.02, 0.05, 0.08, 0.12};
  std::array<int, 7> sv_subsamples{2, 4, 2, 8, 4, 4, 8};
  /// Area scale of the soft-overlap blend; the per-axis overlap extent is
  /// C^1-smoothed over a band of width sqrt(smoothing_eps) so the gradient
  /// exists at contact boundaries. Outside the band values are exact.
  Scalar smoothing_eps = kDefaultSmoothingEps;
};

void validate(const CostParams& params);

struct CostReport {
  Eigen::Matrix<Scalar, 5, 1> iv_terms = Eigen::Matrix<Scalar, 5, 1>::Zero();
  Eigen::Matrix<Scalar, 7, 1> sv_terms = Eigen::Matrix<Scalar, 7, 1>::Zero();
  Scalar total = 0.0;
  Mat gradient;  // L x D, d(total)/d(waypoint); boundary rows included
};

/// Smoothed hinge used for soft overlap: exactly 0 for x <= 0, exactly x
/// for x >= delta, C^1 cubic blend in between (always <= x).
Scalar smooth_hinge(Scalar x, Scalar delta);
Scalar smooth_hinge_deriv(Scalar x, Scalar delta);

/// Intersection-volume cost: soft overlap between every waypoint's body
/// boxes and every obstacle inflated by `margin`, summed. Optionally
/// accumulates d(cost)/d(waypoint) into *grad (must be L x D, zero-init by
/// caller or accumulated across terms).
Scalar iv_cost(const Trajectory& traj, const Scene& scene,
               const RobotModel& robot, Scalar margin,
               Scalar smoothing_eps = kDefaultSmoothingEps,
               Mat* grad = nullptr);

/// Swept-volume cost: the same soft overlap accumulated at `subsamples`
/// midpoint-rule configurations per segment, scaled by 1/subsamples; a
/// quadrature of the overlap swept between consecutive waypoints.
Scalar sv_cost(const Trajectory& traj, const Scene& scene,
               const RobotModel& robot, Scalar margin, int subsamples,
               Scalar smoothing_eps = kDefaultSmoothingEps,
               Mat* grad = nullptr);

/// All twelve terms, their sum, and the analytic gradient.
CostReport sum_of_costs(const Trajectory& traj, const Scene& scene,
                        const RobotModel& robot, const CostParams& params,
                        bool with_gradient = true);

Mat cost_gradient(const Trajectory& traj, const Scene& scene,
                  const RobotModel& robot, const CostParams& params);

}  // namespace socdiff
