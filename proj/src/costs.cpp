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

#include "socdiff/costs.hpp"

#include <cmath>
#include <stdexcept>

namespace socdiff {

void validate(const CostParams& params) {
  for (Scalar m : params.iv_margins)
    if (m < 0.0) throw std::invalid_argument("CostParams: iv margin < 0");
  for (Scalar m : params.sv_margins)
    if (m < 0.0) throw std::invalid_argument("CostParams: sv margin < 0");
  for (int s : params.sv_subsamples)
    if (s < 1) throw std::invalid_argument("CostParams: subsamples < 1");
  if (!(params.smoothing_eps > 0.0))
    throw std::invalid_argument("CostParams: smoothing_eps must be > 0");
}

Scalar smooth_hinge(Scalar x, Scalar delta) {
  if (x <= 0.0) return 0.0;
  if (x >= delta) return x;
  const Scalar r = x / delta;
  return x * r * (2.0 - r);
}

Scalar smooth_hinge_deriv(Scalar x, Scalar delta) {
  if (x <= 0.0) return 0.0;
  if (x >= delta) return 1.0;
  const Scalar r = x / delta;
  return r * (4.0 - 3.0 * r);
}

namespace {

// Struct-of-arrays obstacle faces at one inflation margin, so a body box
// can be tested against the whole scene with array expressions.
struct InflatedObstacles {
  Arr min_x, min_y, max_x, max_y;

  InflatedObstacles(const std::vector<Aabb>& obs, Scalar margin) {
    const Index n = static_cast<Index>(obs.size());
    min_x.resize(n);
    min_y.resize(n);
    max_x.resize(n);
    max_y.resize(n);
    for (Index i = 0; i < n; ++i) {
      const Aabb& o = obs[static_cast<std::size_t>(i)];
      min_x[i] = o.min.x() - margin;
      min_y[i] = o.min.y() - margin;
      max_x[i] = o.max.x() + margin;
      max_y[i] = o.max.y() + margin;
    }
  }

  Index size() const { return min_x.size(); }
};

struct Workspace {
  Arr ex, ey, sx, sy, dx, dy;
  std::vector<Vec2> fk_points;
  std::vector<Vec2> adj_points;
};

Arr hinge_array(const Arr& x, Scalar delta) {
  return x.unaryExpr([delta](Scalar v) { return smooth_hinge(v, delta); });
}

Arr hinge_deriv_array(const Arr& x, Scalar delta) {
  return x.unaryExpr(
      [delta](Scalar v) { return smooth_hinge_deriv(v, delta); });
}

// Soft overlap of one box against all obstacles; face sensitivities go to
// d_min/d_max when requested.
Scalar accumulate_box(const Vec2& bmin, const Vec2& bmax,
                      const InflatedObstacles& obs, Scalar delta,
                      Workspace& ws, Vec2* d_min, Vec2* d_max) {
  if (obs.size() == 0) return 0.0;
  ws.ex = obs.max_x.min(bmax.x()) - obs.min_x.max(bmin.x());
  ws.ey = obs.max_y.min(bmax.y()) - obs.min_y.max(bmin.y());
  ws.sx = hinge_array(ws.ex, delta);
  ws.sy = hinge_array(ws.ey, delta);
  const Scalar value = (ws.sx * ws.sy).sum();
  if (value == 0.0 || d_min == nullptr) return value;

  ws.dx = hinge_deriv_array(ws.ex, delta) * ws.sy;
  ws.dy = hinge_deriv_array(ws.ey, delta) * ws.sx;
  // The min/max in the extent pick either the body face or the obstacle
  // face; only body-face selections contribute to the gradient.
  d_max->x() += ((bmax.x() <= obs.max_x).cast<Scalar>() * ws.dx).sum();
  d_min->x() -= ((bmin.x() >= obs.min_x).cast<Scalar>() * ws.dx).sum();
  d_max->y() += ((bmax.y() <= obs.max_y).cast<Scalar>() * ws.dy).sum();
  d_min->y() -= ((bmin.y() >= obs.min_y).cast<Scalar>() * ws.dy).sum();
  return value;
}

// Soft overlap of the whole robot at configuration q; if adj_q is given,
// adds weight * d(value)/dq into it.
Scalar eval_config(const RobotModel& robot, const Vec& q,
                   const InflatedObstacles& obs, Scalar delta, Workspace& ws,
                   Vec* adj_q, Scalar weight) {
  const Scalar h = robot.link_half_width;
  if (robot.kind == RobotKind::PointRobot) {
    const Vec2 c(q[0], q[1]);
    Vec2 d_min = Vec2::Zero(), d_max = Vec2::Zero();
    const Scalar v =
        accumulate_box(c.array() - h, c.array() + h, obs, delta, ws,
                       adj_q ? &d_min : nullptr, adj_q ? &d_max : nullptr);
    if (adj_q && v != 0.0) {
      (*adj_q)[0] += weight * (d_min.x() + d_max.x());
      (*adj_q)[1] += weight * (d_min.y() + d_max.y());
    }
    return v;
  }

  // Planar arm: forward kinematics, one box per link, then backpropagate
  // point sensitivities through the chain.
  const std::size_t n = robot.link_lengths.size();
  ws.fk_points.resize(n + 1);
  ws.adj_points.assign(n + 1, Vec2::Zero());
  std::vector<Scalar> thetas(n);
  {
    Vec2 p = Vec2::Zero();
    ws.fk_points[0] = p;
    Scalar theta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      theta += q[static_cast<Index>(j)];
      thetas[j] = theta;
      p += robot.link_lengths[j] * Vec2(std::cos(theta), std::sin(theta));
      ws.fk_points[j + 1] = p;
    }
  }

  Scalar value = 0.0;
  bool any = false;
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2& pa = ws.fk_points[j];
    const Vec2& pb = ws.fk_points[j + 1];
    const Vec2 bmin = pa.cwiseMin(pb).array() - h;
    const Vec2 bmax = pa.cwiseMax(pb).array() + h;
    Vec2 d_min = Vec2::Zero(), d_max = Vec2::Zero();
    const Scalar v = accumulate_box(bmin, bmax, obs, delta, ws,
                                    adj_q ? &d_min : nullptr,
                                    adj_q ? &d_max : nullptr);
    value += v;
    if (adj_q && v != 0.0) {
      any = true;
      for (int ax = 0; ax < 2; ++ax) {
        if (pa[ax] <= pb[ax]) {
          ws.adj_points[j][ax] += d_min[ax];
          ws.adj_points[j + 1][ax] += d_max[ax];
        } else {
          ws.adj_points[j][ax] += d_max[ax];
          ws.adj_points[j + 1][ax] += d_min[ax];
        }
      }
    }
  }

  if (adj_q && any) {
    // adj_theta_m = l_m * (-sin, cos)(theta_m) . sum_{j>=m} adj_p_j and
    // adj_q_i = sum_{m>=i} adj_theta_m; both are suffix sums.
    Vec2 point_suffix = Vec2::Zero();
    Scalar theta_suffix = 0.0;
    for (std::size_t m = n; m >= 1; --m) {
      point_suffix += ws.adj_points[m];
      const Scalar t = thetas[m - 1];
      theta_suffix += robot.link_lengths[m - 1] *
                      (-std::sin(t) * point_suffix.x() +
                       std::cos(t) * point_suffix.y());
      (*adj_q)[static_cast<Index>(m - 1)] += weight * theta_suffix;
    }
  }
  return value;
}

void check_inputs(const Trajectory& traj, const Scene& scene,
                  const RobotModel& robot, Index min_rows) {
  validate(robot);
  if (traj.cols() != robot.config_dim())
    throw std::invalid_argument("cost: trajectory dimension does not match "
                                "robot configuration dimension");
  if (traj.rows() < min_rows)
    throw std::invalid_argument("cost: too few waypoints");
  for (const Aabb& o : scene.obstacles) validate(o);
}

}  // namespace

Scalar iv_cost(const Trajectory& traj, const Scene& scene,
               const RobotModel& robot, Scalar margin, Scalar smoothing_eps,
               Mat* grad) {
  check_inputs(traj, scene, robot, 1);
  if (margin < 0.0) throw std::invalid_argument("iv_cost: margin < 0");
  const Scalar delta = std::sqrt(smoothing_eps);
  const InflatedObstacles obs(scene.obstacles, margin);
  Workspace ws;
  Vec adj(traj.cols());
  Scalar total = 0.0;
  for (Index l = 0; l < traj.rows(); ++l) {
    adj.setZero();
    const Vec q = traj.row(l).transpose();
    total += eval_config(robot, q, obs, delta, ws, grad ? &adj : nullptr, 1.0);
    if (grad) grad->row(l) += adj.transpose();
  }
  return total;
}

Scalar sv_cost(const Trajectory& traj, const Scene& scene,
               const RobotModel& robot, Scalar margin, int subsamples,
               Scalar smoothing_eps, Mat* grad) {
  check_inputs(traj, scene, robot, 2);
  if (margin < 0.0) throw std::invalid_argument("sv_cost: margin < 0");
  if (subsamples < 1)
    throw std::invalid_argument("sv_cost: subsamples must be >= 1");
  const Scalar delta = std::sqrt(smoothing_eps);
  const InflatedObstacles obs(scene.obstacles, margin);
  Workspace ws;
  Vec adj(traj.cols());
  const Scalar scale = 1.0 / static_cast<Scalar>(subsamples);
  Scalar total = 0.0;
  for (Index seg = 0; seg + 1 < traj.rows(); ++seg) {
    for (int m = 0; m < subsamples; ++m) {
      // Midpoint-rule quadrature along the segment; waypoints themselves
      // are never sampled (the IV terms cover those).
      const Scalar alpha =
          (static_cast<Scalar>(m) + 0.5) / static_cast<Scalar>(subsamples);
      const Vec q = ((1.0 - alpha) * traj.row(seg) + alpha * traj.row(seg + 1))
                        .transpose();
      adj.setZero();
      total +=
          scale * eval_config(robot, q, obs, delta, ws, grad ? &adj : nullptr,
                              scale);
      if (grad) {
        grad->row(seg) += (1.0 - alpha) * adj.transpose();
        grad->row(seg + 1) += alpha * adj.transpose();
      }
    }
  }
  return total;
}

CostReport sum_of_costs(const Trajectory& traj, const Scene& scene,
                        const RobotModel& robot, const CostParams& params,
                        bool with_gradient) {
  validate(params);
  check_inputs(traj, scene, robot, 2);
  CostReport report;
  report.gradient = Mat::Zero(traj.rows(), traj.cols());
  Mat* grad = with_gradient ? &report.gradient : nullptr;
  for (std::size_t j = 0; j < params.sv_margins.size(); ++j) {
    report.sv_terms[static_cast<Index>(j)] =
        sv_cost(traj, scene, robot, params.sv_margins[j],
                params.sv_subsamples[j], params.smoothing_eps, grad);
  }
  for (std::size_t l = 0; l < params.iv_margins.size(); ++l) {
    report.iv_terms[static_cast<Index>(l)] =
        iv_cost(traj, scene, robot, params.iv_margins[l], params.smoothing_eps,
                grad);
  }
  report.total = report.sv_terms.sum() + report.iv_terms.sum();
  return report;
}

Mat cost_gradient(const Trajectory& traj, const Scene& scene,
                  const RobotModel& robot, const CostParams& params) {
  return sum_of_costs(traj, scene, robot, params, true).gradient;
}

}  // namespace socdiff
