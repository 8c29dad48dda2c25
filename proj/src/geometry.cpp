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

#include "socdiff/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace socdiff {

RobotModel RobotModel::point(Scalar half_width) {
  RobotModel r;
  r.kind = RobotKind::PointRobot;
  r.link_half_width = half_width;
  r.config_min = Vec::Constant(2, -1.0);
  r.config_max = Vec::Constant(2, 1.0);
  return r;
}

RobotModel RobotModel::arm(std::vector<Scalar> lengths, Scalar half_width) {
  RobotModel r;
  r.kind = RobotKind::PlanarArm;
  r.link_lengths = std::move(lengths);
  r.link_half_width = half_width;
  const Index d = r.config_dim();
  r.config_min = Vec::Constant(d, -M_PI);
  r.config_max = Vec::Constant(d, M_PI);
  return r;
}

void validate(const Aabb& box) {
  if (!box.valid())
    throw std::invalid_argument("Aabb: min must not exceed max");
}

void validate(const RobotModel& robot) {
  if (robot.link_half_width <= 0.0)
    throw std::invalid_argument("RobotModel: link_half_width must be > 0");
  if (robot.kind == RobotKind::PlanarArm) {
    if (robot.link_lengths.empty())
      throw std::invalid_argument("RobotModel: arm needs at least one link");
    for (Scalar l : robot.link_lengths)
      if (l <= 0.0)
        throw std::invalid_argument("RobotModel: link lengths must be > 0");
  }
  const Index d = robot.config_dim();
  if (robot.config_min.size() != d || robot.config_max.size() != d)
    throw std::invalid_argument("RobotModel: config bounds size mismatch");
  for (Index i = 0; i < d; ++i)
    if (!(robot.config_min[i] < robot.config_max[i]))
      throw std::invalid_argument("RobotModel: config_min must be < config_max");
}

Scalar overlap_volume(const Aabb& a, const Aabb& b) {
  validate(a);
  validate(b);
  const Vec2 extent =
      a.max.cwiseMin(b.max) - a.min.cwiseMax(b.min);
  if (extent.x() <= 0.0 || extent.y() <= 0.0) return 0.0;
  return extent.prod();
}

Aabb inflate(const Aabb& a, Scalar margin) {
  validate(a);
  Aabb out{a.min.array() - margin, a.max.array() + margin};
  if (!out.valid())
    throw std::invalid_argument("inflate: margin makes the box degenerate");
  return out;
}

std::vector<Vec2> forward_kinematics(const RobotModel& robot,
                                     const Eigen::Ref<const Vec>& q) {
  if (q.size() != robot.config_dim())
    throw std::invalid_argument("forward_kinematics: configuration dimension "
                                "does not match robot");
  if (robot.kind == RobotKind::PointRobot) return {Vec2(q[0], q[1])};

  std::vector<Vec2> points;
  points.reserve(robot.link_lengths.size() + 1);
  Vec2 p = Vec2::Zero();
  points.push_back(p);
  Scalar theta = 0.0;
  for (std::size_t j = 0; j < robot.link_lengths.size(); ++j) {
    theta += q[static_cast<Index>(j)];
    p += robot.link_lengths[j] * Vec2(std::cos(theta), std::sin(theta));
    points.push_back(p);
  }
  return points;
}

BodyBoxes body_boxes(const RobotModel& robot, const Eigen::Ref<const Vec>& q) {
  const auto points = forward_kinematics(robot, q);
  const Scalar h = robot.link_half_width;
  BodyBoxes out;
  if (robot.kind == RobotKind::PointRobot) {
    out.boxes.push_back({points[0].array() - h, points[0].array() + h});
    return out;
  }
  out.boxes.reserve(points.size() - 1);
  for (std::size_t j = 1; j < points.size(); ++j) {
    const Vec2& a = points[j - 1];
    const Vec2& b = points[j];
    out.boxes.push_back({a.cwiseMin(b).array() - h, a.cwiseMax(b).array() + h});
  }
  return out;
}

namespace {
int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Scalar v = (b.x() - a.x()) * (c.y() - a.y()) -
                   (b.y() - a.y()) * (c.x() - a.x());
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return p.x() >= std::min(a.x(), b.x()) && p.x() <= std::max(a.x(), b.x()) &&
         p.y() >= std::min(a.y(), b.y()) && p.y() <= std::max(a.y(), b.y());
}
}  // namespace

bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                        const Vec2& b1) {
  const int o1 = orientation(a0, a1, b0);
  const int o2 = orientation(a0, a1, b1);
  const int o3 = orientation(b0, b1, a0);
  const int o4 = orientation(b0, b1, a1);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a0, a1, b0)) return true;
  if (o2 == 0 && on_segment(a0, a1, b1)) return true;
  if (o3 == 0 && on_segment(b0, b1, a0)) return true;
  if (o4 == 0 && on_segment(b0, b1, a1)) return true;
  return false;
}

}  // namespace socdiff
