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
#include <stdexcept>
#include <string>
#include <vector>

#include "socdiff/geometry.hpp"
#include "socdiff/rng.hpp"
#include "socdiff/types.hpp"

namespace socdiff {

enum class SceneType { Corridor, Cubby, Clutter, Tabletop2D };

const char* to_string(SceneType t);
SceneType scene_type_from_string(const std::string& s);

/// Obstacle layout inside a rectangular workspace.
struct Scene {
  std::vector<Aabb> obstacles;
  Aabb bounds{Vec2(-1.0, -1.0), Vec2(1.0, 1.0)};
  SceneType scene_type = SceneType::Clutter;
};

/// One planning problem: a scene plus start/goal configurations.
struct Problem {
  Vec q_start;
  Vec q_goal;
  Scene scene;
};

struct BenchmarkSuite {
  std::vector<Problem> problems;
  std::vector<SceneType> problem_types;  // parallel to problems
  RobotModel robot;
  std::uint64_t seed = 0;
  int per_type = 0;
};

/// Thrown when rejection sampling cannot place a collision-free
/// configuration within the retry budget.
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemGenOptions {
  /// Required start/goal separation as a fraction of the robot's
  /// workspace diameter (bounds diagonal for a point robot, twice the
  /// total reach for an arm).
  Scalar separation_fraction = 0.5;
  int max_attempts = 4000;
};

Scene generate_scene(SceneType type, Rng& rng);

/// True iff configuration q is collision-free against the scene obstacles
/// at zero margin.
bool config_collision_free(const RobotModel& robot,
                           const Eigen::Ref<const Vec>& q, const Scene& scene);

Problem generate_problem(const Scene& scene, const RobotModel& robot, Rng& rng,
                         const ProblemGenOptions& opts = {});

BenchmarkSuite generate_suite(const RobotModel& robot, int per_type,
                              std::uint64_t seed,
                              const ProblemGenOptions& opts = {});

/// Smooth spline trajectories in normalized [-1, 1]^D space, L waypoints
/// each, re-parameterized to uniform arc length. Obstacle-agnostic: these
/// teach the denoiser smoothness, nothing else.
std::vector<Trajectory> generate_training_set(const RobotModel& robot, int n,
                                              Index waypoints, Rng& rng);

/// Map configurations to the diffusion model's [-1, 1] range and back.
Trajectory normalize(const Trajectory& traj, const RobotModel& robot);
Trajectory denormalize(const Trajectory& traj, const RobotModel& robot);

}  // namespace socdiff
