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

#include <vector>

#include "socdiff/types.hpp"

namespace socdiff {

/// Axis-aligned box in the plane. All collision geometry (robot bodies and
/// obstacles) reduces to these.
struct Aabb {
  Vec2 min{Vec2::Zero()};
  Vec2 max{Vec2::Zero()};

  Scalar area() const { return (max - min).prod(); }
  Vec2 center() const { return 0.5 * (min + max); }
  bool valid() const { return min.x() <= max.x() && min.y() <= max.y(); }
};

enum class RobotKind { PointRobot, PlanarArm };

/// Planar robot description. A PointRobot is a square body moving in (x, y);
/// a PlanarArm is a serial chain of links rooted at the origin whose
/// configuration is the vector of joint angles in radians.
///
/// config_min/config_max bound the configuration space per dimension and
/// double as the normalization range for diffusion ([lo, hi] maps to [-1, 1]).
struct RobotModel {
  RobotKind kind = RobotKind::PointRobot;
  std::vector<Scalar> link_lengths;  // arm only, one per joint
  Scalar link_half_width = 0.04;
  Vec config_min;
  Vec config_max;

  Index config_dim() const {
    return kind == RobotKind::PointRobot
               ? 2
               : static_cast<Index>(link_lengths.size());
  }

  static RobotModel point(Scalar half_width = 0.04);
  static RobotModel arm(std::vector<Scalar> lengths, Scalar half_width = 0.05);
};

/// One collision box per robot body element at a fixed configuration.
struct BodyBoxes {
  std::vector<Aabb> boxes;
};

void validate(const Aabb& box);
void validate(const RobotModel& robot);

/// Overlap area of two boxes: prod_i max(0, min(max) - max(min)).
/// Exactly zero iff the boxes are separated along some axis.
Scalar overlap_volume(const Aabb& a, const Aabb& b);

/// Grow (or shrink, for negative margin) a box by `margin` on every side.
/// Throws if the result would be degenerate.
Aabb inflate(const Aabb& a, Scalar margin);

/// Joint/endpoint positions at configuration q.
/// PointRobot: the single position q. PlanarArm: base plus one cumulative
/// position per link, so result.size() == links + 1.
std::vector<Vec2> forward_kinematics(const RobotModel& robot,
                                     const Eigen::Ref<const Vec>& q);

/// Collision boxes at configuration q. PointRobot gives the square of
/// half-extent link_half_width around q; PlanarArm gives the AABB of each
/// link segment inflated by link_half_width.
BodyBoxes body_boxes(const RobotModel& robot, const Eigen::Ref<const Vec>& q);

/// True iff segments a0-a1 and b0-b1 intersect (touching counts).
bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                        const Vec2& b1);

}  // namespace socdiff
