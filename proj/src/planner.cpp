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

#include "socdiff/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "socdiff/parallel.hpp"

namespace socdiff {

const char* to_string(GuidanceTarget t) {
  return t == GuidanceTarget::PredictedTau0 ? "tau0" : "tau_t";
}

GuidanceTarget guidance_target_from_string(const std::string& s) {
  if (s == "tau0") return GuidanceTarget::PredictedTau0;
  if (s == "tau_t") return GuidanceTarget::NoisyTauT;
  throw std::invalid_argument("unknown guidance target: " + s);
}

void validate(const PlannerConfig& cfg) {
  if (cfg.K < 1) throw std::invalid_argument("planner: K must be >= 1");
  if (cfg.T < 1) throw std::invalid_argument("planner: T must be >= 1");
  if (cfg.workers < 1)
    throw std::invalid_argument("planner: workers must be >= 1");
  if (cfg.fixed_start_step &&
      (*cfg.fixed_start_step < 1 || *cfg.fixed_start_step > cfg.T)) {
    throw std::invalid_argument(
        "planner: fixed_start_step must lie in [1, T]");
  }
  validate(cfg.guidance);
  validate(cfg.costs);
}

namespace {

bool config_clear(const RobotModel& robot, const Vec& q, const Scene& scene) {
  for (const Aabb& body : body_boxes(robot, q).boxes) {
    for (const Aabb& o : scene.obstacles) {
      if (overlap_volume(body, o) > 0.0) return false;
    }
  }
  if (robot.kind == RobotKind::PlanarArm) {
    const auto pts = forward_kinematics(robot, q);
    const std::size_t links = pts.size() - 1;
    for (std::size_t i = 0; i + 2 < links; ++i) {
      for (std::size_t j = i + 2; j < links; ++j) {
        if (segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1]))
          return false;
      }
    }
  }
  return true;
}

}  // namespace

bool is_valid(const Trajectory& traj, const Problem& problem,
              const RobotModel& robot) {
  const Index L = traj.rows();
  if (L < 2 || traj.cols() != robot.config_dim() ||
      problem.q_start.size() != robot.config_dim() ||
      problem.q_goal.size() != robot.config_dim()) {
    throw std::invalid_argument("is_valid: shape mismatch");
  }
  if (!(traj.row(0).transpose().array() == problem.q_start.array()).all() ||
      !(traj.row(L - 1).transpose().array() == problem.q_goal.array()).all())
    return false;
  for (Index l = 0; l < L; ++l) {
    if (!config_clear(robot, traj.row(l).transpose(), problem.scene))
      return false;
  }
  constexpr int kDense = 8;  // interpolation samples per segment
  for (Index l = 0; l + 1 < L; ++l) {
    for (int k = 0; k < kDense; ++k) {
      const Scalar a = (static_cast<Scalar>(k) + 0.5) / kDense;
      const Vec q =
          ((1.0 - a) * traj.row(l) + a * traj.row(l + 1)).transpose();
      if (!config_clear(robot, q, problem.scene)) return false;
    }
  }
  return true;
}

std::pair<std::size_t, bool> select_best(
    const std::vector<Trajectory>& trajectories, const Vec& costs,
    const std::vector<char>& validity) {
  const std::size_t n = trajectories.size();
  if (n == 0) throw std::invalid_argument("select_best: empty input");
  if (static_cast<std::size_t>(costs.size()) != n || validity.size() != n)
    throw std::invalid_argument("select_best: length mismatch");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return costs[static_cast<Index>(a)] <
                            costs[static_cast<Index>(b)];
                   });
  for (std::size_t i : order) {
    if (validity[i]) return {i, true};
  }
  return {order[0], false};
}

PlanResult plan(const Problem& problem, const RobotModel& robot,
                const Denoiser& model, const PlannerConfig& cfg) {
  validate(robot);
  validate(cfg);
  const Index L = model.waypoints();
  const Index D = model.dims();
  if (D != robot.config_dim())
    throw std::invalid_argument("plan: model/robot dimension mismatch");
  if (L < 2) throw std::invalid_argument("plan: model must cover >= 2 waypoints");
  if (problem.q_start.size() != D || problem.q_goal.size() != D)
    throw std::invalid_argument("plan: problem/robot dimension mismatch");

  const NoiseSchedule schedule = make_schedule(cfg.T, cfg.schedule_kind);
  const Scalar w = cfg.guidance.w;
  const std::size_t K = static_cast<std::size_t>(cfg.K);
  const bool fixed = cfg.fixed_start_step.has_value();
  const int floor_step = cfg.guidance.resolved_floor(cfg.T);
  constexpr Scalar kNaN = std::numeric_limits<Scalar>::quiet_NaN();

  // Endpoints in the model's normalized space.
  Trajectory ends(2, D);
  ends.row(0) = problem.q_start.transpose();
  ends.row(1) = problem.q_goal.transpose();
  const Trajectory ends_n = normalize(ends, robot);
  const Vec qs_n = ends_n.row(0).transpose();
  const Vec qg_n = ends_n.row(1).transpose();

  // Chain rule for costs evaluated in world coordinates on normalized
  // chains: d/dx_norm = d/dx_world * (hi - lo) / 2 per dimension.
  Vec grad_scale(D);
  for (Index d = 0; d < D; ++d)
    grad_scale[d] = 0.5 * (robot.config_max[d] - robot.config_min[d]);
  const auto to_normalized_grad = [&](const Mat& grad_world) {
    Mat g = grad_world;
    g.array().rowwise() *= grad_scale.transpose().array();
    g.row(0).setZero();  // boundary rows are pinned, never steered
    g.row(L - 1).setZero();
    return g;
  };

  // One private stream per chain keeps results identical for any worker
  // count: every draw a chain ever makes comes from its own rng.
  std::vector<Rng> rngs;
  rngs.reserve(K);
  for (std::size_t c = 0; c < K; ++c)
    rngs.emplace_back(derive_seed(cfg.seed, static_cast<std::uint64_t>(c)));

  std::vector<Trajectory> tau(K);
  for (std::size_t c = 0; c < K; ++c) {
    tau[c] = Trajectory(L, D);
    rngs[c].fill_normal(tau[c]);
  }

  std::vector<Trajectory> tau0_hat(K);
  std::vector<Mat> grads(K);
  GuidanceState state;
  state.costs = Vec::Zero(static_cast<Index>(K));

  PlanResult out;
  out.trace.reserve(static_cast<std::size_t>(cfg.T));

  for (int t = cfg.T; t >= 1; --t) {
    const std::vector<Mat> eps_hat = model.predict_eps_batch(tau, t, schedule);
    for (std::size_t c = 0; c < K; ++c)
      tau0_hat[c] = predict_tau0(tau[c], eps_hat[c], t, schedule);

    const bool was_active = state.active;
    // Once active with the default target, one pass yields both the trigger
    // costs and the steering gradients.
    const bool merged_grad =
        was_active && w > 0.0 &&
        cfg.guidance_target == GuidanceTarget::PredictedTau0;
    const bool need_costs =
        !(cfg.skip_unused_cost_eval && was_active && w == 0.0);

    if (need_costs) {
      parallel_for(K, cfg.workers, [&](std::size_t c) {
        const Trajectory world = denormalize(tau0_hat[c], robot);
        const CostReport rep = sum_of_costs(world, problem.scene, robot,
                                            cfg.costs, merged_grad);
        state.costs[static_cast<Index>(c)] = rep.total;
        if (merged_grad) grads[c] = to_normalized_grad(rep.gradient);
      });

      const int elapsed = cfg.T - t;
      if (!fixed) {
        detect_trigger(state, cfg.guidance, elapsed, t);
        if (!state.active && t <= floor_step) {
          state.active = true;
          state.trigger_step = t;
        }
      } else {
        // Trigger bypassed, but the uniformity curve still gets recorded.
        state.weights = softmax_weights(state.costs, cfg.guidance.lambda);
        state.U = uniformity(state.weights);
        state.U_smooth =
            ema_update(state.U, state.U_smooth_prev, cfg.guidance.gamma);
        state.grad_U = std::abs(state.U_smooth - state.U_smooth_prev);
        state.U_smooth_prev = state.U_smooth;
      }
    }
    if (fixed && !state.active && t <= *cfg.fixed_start_step) {
      state.active = true;
      state.trigger_step = t;
    }

    if (state.active && w > 0.0) {
      if (!merged_grad) {
        // Activation step, or the noisy-state ablation target.
        parallel_for(K, cfg.workers, [&](std::size_t c) {
          const Trajectory& at =
              cfg.guidance_target == GuidanceTarget::PredictedTau0
                  ? tau0_hat[c]
                  : tau[c];
          const Trajectory world = denormalize(at, robot);
          grads[c] = to_normalized_grad(
              sum_of_costs(world, problem.scene, robot, cfg.costs, true)
                  .gradient);
        });
      }
      for (std::size_t c = 0; c < K; ++c)
        tau[c] = guided_update(tau[c], grads[c], w);
    }

    parallel_for(K, cfg.workers, [&](std::size_t c) {
      tau[c] = reverse_step(tau[c], eps_hat[c], t, schedule, rngs[c]);
      tau[c] = fix_boundaries(tau[c], qs_n, qg_n);
    });

    StepTrace rec;
    rec.t = t;
    rec.active = state.active;
    if (need_costs) {
      rec.cost_min = state.costs.minCoeff();
      rec.cost_mean = state.costs.mean();
      rec.cost_max = state.costs.maxCoeff();
      rec.U = state.U;
      rec.U_smooth = state.U_smooth;
      rec.grad_U = state.grad_U;
    } else {
      rec.cost_min = rec.cost_mean = rec.cost_max = kNaN;
      rec.U = rec.U_smooth = rec.grad_U = kNaN;
    }
    out.trace.push_back(rec);
  }

  // Selection runs on the world-space outputs with exact endpoints.
  std::vector<Trajectory> world(K);
  std::vector<char> valid(K);
  Vec final_costs(static_cast<Index>(K));
  parallel_for(K, cfg.workers, [&](std::size_t c) {
    world[c] = denormalize(tau[c], robot);
    world[c].row(0) = problem.q_start.transpose();
    world[c].row(L - 1) = problem.q_goal.transpose();
    final_costs[static_cast<Index>(c)] =
        sum_of_costs(world[c], problem.scene, robot, cfg.costs, false).total;
    valid[c] = is_valid(world[c], problem, robot) ? 1 : 0;
  });

  const auto [idx, success] = select_best(world, final_costs, valid);
  out.best = world[idx];
  out.success = success;
  out.best_cost = final_costs[static_cast<Index>(idx)];
  out.trigger_step = state.trigger_step;
  out.all_costs = final_costs;
  return out;
}

}  // namespace socdiff
