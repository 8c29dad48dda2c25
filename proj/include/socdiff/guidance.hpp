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

#include <optional>

#include "socdiff/types.hpp"

namespace socdiff {

/// Knobs of the dynamic gradient-guidance schedule.
struct GuidanceConfig {
  Scalar w = 0.1;       // guidance scale on the cost gradient
  Scalar lambda = 0.1;  // softmax temperature over chain costs
  Scalar gamma = 0.9;   // EMA coefficient for the uniformity signal
  /// Trigger threshold on |EMA change|; when unset it resolves to
  /// 0.002 * K so the trigger scales with the attainable uniformity.
  std::optional<Scalar> epsilon;
  /// Steps at the start of the run during which the trigger is held off;
  /// the EMA starts from 0, so its first few deltas are not meaningful.
  int warmup_steps = 5;
  /// If the trigger never fires, guidance activates when t reaches this
  /// step anyway; unset resolves to T/8.
  std::optional<int> fallback_floor_step;

  Scalar resolved_epsilon(int K) const;
  int resolved_floor(int T) const;
};

void validate(const GuidanceConfig& cfg);

/// Per-step trigger bookkeeping shared by the K chains.
struct GuidanceState {
  Vec costs;       // J(tau0_hat) per chain
  Vec weights;     // softmax weights per chain
  Scalar U = 0.0;  // instantaneous uniformity
  Scalar U_smooth = 0.0;
  Scalar U_smooth_prev = 0.0;  // EMA value of the previous (later) step
  Scalar grad_U = 0.0;         // |U_smooth - U_smooth_prev|
  bool active = false;
  std::optional<int> trigger_step;
};

/// Softmax of -costs/lambda with max subtraction; returns a simplex point.
Vec softmax_weights(const Eigen::Ref<const Vec>& costs, Scalar lambda);

/// Inverse participation ratio 1 / sum w_i^2: K for uniform weights, 1 for
/// a point mass.
Scalar uniformity(const Eigen::Ref<const Vec>& weights);

Scalar ema_update(Scalar u, Scalar u_smooth_prev, Scalar gamma);

/// Advance the trigger state for one step given state.U (already computed
/// for this step) and state.U_smooth_prev. Activates, permanently, when
/// the EMA delta falls below epsilon after the warmup; `step` records the
/// current timestep t for diagnostics.
void update_trigger(GuidanceState& state, const GuidanceConfig& cfg, int K,
                    int steps_elapsed, int step);

/// Full per-step trigger pipeline: softmax weights, uniformity, EMA,
/// threshold test. Call once per denoising step while inactive.
void detect_trigger(GuidanceState& state, const GuidanceConfig& cfg,
                    int steps_elapsed, int step);

/// The guided update tau - w * grad, elementwise.
Trajectory guided_update(const Trajectory& tau, const Mat& grad, Scalar w);

}  // namespace socdiff
