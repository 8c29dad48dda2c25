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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "socdiff/costs.hpp"
#include "socdiff/denoiser.hpp"
#include "socdiff/diffusion.hpp"
#include "socdiff/guidance.hpp"
#include "socdiff/world.hpp"

namespace socdiff {

/// Where the steering gradient is evaluated: on the clean-trajectory
/// estimate (default) or directly on the noisy chain state.
enum class GuidanceTarget { PredictedTau0, NoisyTauT };

const char* to_string(GuidanceTarget t);
GuidanceTarget guidance_target_from_string(const std::string& s);

struct PlannerConfig {
  int K = 64;   // parallel denoising chains
  int T = 128;  // diffusion steps
  ScheduleKind schedule_kind = ScheduleKind::Linear;
  GuidanceConfig guidance;
  CostParams costs;
  GuidanceTarget guidance_target = GuidanceTarget::PredictedTau0;
  /// When set, guidance activates exactly at this step (counting t = T..1)
  /// and the uniformity trigger is bypassed.
  std::optional<int> fixed_start_step;
  std::uint64_t seed = 0;
  int workers = 1;
  /// Skip per-chain cost evaluation on steps where nothing consumes it
  /// (guidance already active but w == 0). Off by default so run traces
  /// carry the full cost history.
  bool skip_unused_cost_eval = false;
};

void validate(const PlannerConfig& cfg);

/// One record per denoising step; the data behind trigger/uniformity plots.
/// Cost and uniformity fields are NaN on steps where evaluation was skipped.
struct StepTrace {
  int t = 0;
  Scalar cost_min = 0, cost_mean = 0, cost_max = 0;
  Scalar U = 0, U_smooth = 0, grad_U = 0;
  bool active = false;
};

struct PlanResult {
  Trajectory best;  // world coordinates, endpoints exactly start/goal
  bool success = false;
  Scalar best_cost = 0.0;
  std::optional<int> trigger_step;
  Vec all_costs;  // final cost per chain
  std::vector<StepTrace> trace;
};

/// True iff the trajectory starts/ends exactly on the problem endpoints,
/// no waypoint or dense interpolation sample (8 per segment) overlaps an
/// obstacle at zero margin, and (arms) no non-adjacent links intersect.
bool is_valid(const Trajectory& traj, const Problem& problem,
              const RobotModel& robot);

/// Index of the first collision-free trajectory in ascending cost order
/// (ties broken by chain index) with success = true; if none is valid,
/// the cheapest index with success = false.
std::pair<std::size_t, bool> select_best(
    const std::vector<Trajectory>& trajectories, const Vec& costs,
    const std::vector<char>& validity);

/// K guided denoising chains end to end: batched noise prediction, clean
/// estimates, per-chain costs, the uniformity trigger, guided updates once
/// active, ancestral reverse steps, and boundary clamping, followed by
/// cost-sorted collision-free selection.
PlanResult plan(const Problem& problem, const RobotModel& robot,
                const Denoiser& model, const PlannerConfig& cfg);

}  // namespace socdiff
