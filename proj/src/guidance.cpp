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

#include "socdiff/guidance.hpp"

#include <cmath>
#include <stdexcept>

namespace socdiff {

Scalar GuidanceConfig::resolved_epsilon(int K) const {
  if (epsilon) return *epsilon;
  return 0.002 * static_cast<Scalar>(K);
}

int GuidanceConfig::resolved_floor(int T) const {
  if (fallback_floor_step) return *fallback_floor_step;
  return std::max(1, T / 8);
}

void validate(const GuidanceConfig& cfg) {
  if (!(cfg.w >= 0.0) || !std::isfinite(cfg.w)) {
    throw std::invalid_argument("guidance: w must be finite and >= 0");
  }
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) {
    throw std::invalid_argument("guidance: lambda must be finite and > 0");
  }
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) {
    throw std::invalid_argument("guidance: gamma must be in [0, 1]");
  }
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) {
    throw std::invalid_argument("guidance: epsilon must be > 0");
  }
  if (cfg.warmup_steps < 0) {
    throw std::invalid_argument("guidance: warmup_steps must be >= 0");
  }
  if (cfg.fallback_floor_step && *cfg.fallback_floor_step < 1) {
    throw std::invalid_argument("guidance: fallback floor must be >= 1");
  }
}

Vec softmax_weights(const Eigen::Ref<const Vec>& costs, Scalar lambda) {
  if (costs.size() == 0) {
    throw std::invalid_argument("softmax_weights: empty cost vector");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("softmax_weights: lambda must be > 0");
  }
  // exp(-J/lambda) with the max logit subtracted for stability.
  const Vec logits = -costs / lambda;
  const Scalar m = logits.maxCoeff();
  Vec w = (logits.array() - m).exp();
  w /= w.sum();
  return w;
}

Scalar uniformity(const Eigen::Ref<const Vec>& weights) {
  const Scalar s = weights.squaredNorm();
  if (!(s > 0.0)) {
    throw std::invalid_argument("uniformity: weights must not be all zero");
  }
  return 1.0 / s;
}

Scalar ema_update(Scalar u, Scalar u_smooth_prev, Scalar gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("ema_update: gamma must be in [0, 1]");
  }
  return gamma * u_smooth_prev + (1.0 - gamma) * u;
}

void update_trigger(GuidanceState& state, const GuidanceConfig& cfg, int K,
                    int steps_elapsed, int step) {
  state.U_smooth = ema_update(state.U, state.U_smooth_prev, cfg.gamma);
  state.grad_U = std::abs(state.U_smooth - state.U_smooth_prev);
  if (!state.active && steps_elapsed >= cfg.warmup_steps &&
      state.grad_U < cfg.resolved_epsilon(K)) {
    state.active = true;
    state.trigger_step = step;
  }
  state.U_smooth_prev = state.U_smooth;
}

void detect_trigger(GuidanceState& state, const GuidanceConfig& cfg,
                    int steps_elapsed, int step) {
  state.weights = softmax_weights(state.costs, cfg.lambda);
  state.U = uniformity(state.weights);
  update_trigger(state, cfg, static_cast<int>(state.costs.size()),
                 steps_elapsed, step);
}

Trajectory guided_update(const Trajectory& tau, const Mat& grad, Scalar w) {
  if (tau.rows() != grad.rows() || tau.cols() != grad.cols()) {
    throw std::invalid_argument("guided_update: shape mismatch");
  }
  return tau - w * grad;
}

}  // namespace socdiff
