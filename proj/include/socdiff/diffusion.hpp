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

#include "socdiff/rng.hpp"
#include "socdiff/types.hpp"
#include "socdiff/world.hpp"

namespace socdiff {

enum class ScheduleKind { Linear, Cosine };

const char* to_string(ScheduleKind k);
ScheduleKind schedule_kind_from_string(const std::string& s);

/// Variance schedule over T steps. Timesteps are 1-based throughout:
/// beta(t), alpha(t), alpha_bar(t) for t in [1, T], with alpha_bar(0) == 1.
struct NoiseSchedule {
  int T = 0;
  Vec beta;
  Vec alpha;
  Vec alpha_bar;

  Scalar beta_at(int t) const { return beta[t - 1]; }
  Scalar alpha_at(int t) const { return alpha[t - 1]; }
  Scalar alpha_bar_at(int t) const {
    return t == 0 ? 1.0 : alpha_bar[t - 1];
  }
};

NoiseSchedule make_schedule(int T, ScheduleKind kind = ScheduleKind::Linear);

/// Closed-form marginal of the forward chain:
/// sqrt(abar_t) tau0 + sqrt(1 - abar_t) eps with eps iid standard normal.
Trajectory forward_sample(const Trajectory& tau0, int t,
                          const NoiseSchedule& schedule, Rng& rng);

/// One-shot clean-trajectory estimate from a noisy one and the predicted
/// noise: (tau_t - sqrt(1 - abar_t) eps_hat) / sqrt(abar_t).
Trajectory predict_tau0(const Trajectory& tau_t, const Mat& eps_hat, int t,
                        const NoiseSchedule& schedule);

/// Posterior mean of one denoising step; exposed for oracle tests.
Trajectory reverse_mean(const Trajectory& tau_t, const Mat& eps_hat, int t,
                        const NoiseSchedule& schedule);

/// One ancestral sampling step: mean plus sigma_t z for t > 1, the mean
/// exactly at t = 1. sigma_t^2 = beta_t (1 - abar_{t-1}) / (1 - abar_t).
Trajectory reverse_step(const Trajectory& tau_t, const Mat& eps_hat, int t,
                        const NoiseSchedule& schedule, Rng& rng);

/// Reset the first and last waypoints to the problem's start and goal.
/// q_start/q_goal must be in the same space as the trajectory.
Trajectory fix_boundaries(const Trajectory& tau,
                          const Eigen::Ref<const Vec>& q_start,
                          const Eigen::Ref<const Vec>& q_goal);

}  // namespace socdiff
