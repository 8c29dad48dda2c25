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

#include "socdiff/world.hpp"

#include <algorithm>
#include <cmath>

namespace socdiff {

const char* to_string(SceneType t) {
  switch (t) {
    case SceneType::Corridor:
      return "corridor";
    case SceneType::Cubby:
      return "cubby";
    case SceneType::Clutter:
      return "clutter";
    case SceneType::Tabletop2D:
      return "tabletop2d";
  }
  return "unknown";
}

SceneType scene_type_from_string(const std::string& s) {
  if (s == "corridor") return SceneType::Corridor;
  if (s == "cubby") return SceneType::Cubby;
  if (s == "clutter") return SceneType::Clutter;
  if (s == "tabletop2d") return SceneType::Tabletop2D;
  throw std::invalid_argument("unknown scene type: " + s);
}

namespace {

Aabb box(Scalar x0, Scalar y0, Scalar x1, Scalar y1) {
  return Aabb{Vec2(x0, y0), Vec2(x1, y1)};
}

// One wall perpendicular to x at `cx`, with a passage of width `gap`
// centered on `gap_center`; emits the two boxes above and below it.
void add_split_wall(Scene& s, Scalar cx, Scalar thickness, Scalar gap_center,
                    Scalar gap) {
  const Scalar x0 = cx - thickness / 2, x1 = cx + thickness / 2;
  const Scalar lo = gap_center - gap / 2, hi = gap_center + gap / 2;
  s.obstacles.push_back(box(x0, s.bounds.min.y(), x1, lo));
  s.obstacles.push_back(box(x0, hi, x1, s.bounds.max.y()));
}

Scene corridor_scene(Rng& rng) {
  // The gap is 1.5-2.5x the default point robot's width and the wall is
  // thick, so threading it takes a deliberate route, not a lucky sample.
  Scene s;
  s.scene_type = SceneType::Corridor;
  const Scalar thickness = rng.uniform(0.3, 0.45);
  const Scalar cx = rng.uniform(-0.3, 0.3);
  const Scalar gap = rng.uniform(0.12, 0.2);
  const Scalar gy = rng.uniform(-0.5, 0.5);
  add_split_wall(s, cx, thickness, gy, gap);
  return s;
}

Scene cubby_scene(Rng& rng) {
  // A recessed compartment: the wall's passage continues as a tunnel
  // between two fins on one side, so the crossing must stay aligned over
  // the whole wall + fin depth, like reaching into a pigeonhole.
  Scene s;
  s.scene_type = SceneType::Cubby;
  const Scalar cx = rng.uniform(-0.25, 0.25);
  const Scalar thickness = rng.uniform(0.16, 0.24);
  const Scalar gap = rng.uniform(0.14, 0.2);
  const Scalar gy = rng.uniform(-0.45, 0.45);
  add_split_wall(s, cx, thickness, gy, gap);
  const Scalar depth = rng.uniform(0.35, 0.55);
  const Scalar slack = rng.uniform(0.02, 0.05);
  const Scalar fin_h = rng.uniform(0.35, 0.55);
  const Scalar side = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const Scalar fx0 = side > 0 ? cx + thickness / 2
                              : cx - thickness / 2 - depth;
  const Scalar fx1 = fx0 + depth;
  const Scalar half_mouth = gap / 2 + slack;
  s.obstacles.push_back(box(fx0, std::max(-1.0, gy - half_mouth - fin_h),
                            fx1, gy - half_mouth));
  s.obstacles.push_back(box(fx0, gy + half_mouth, fx1,
                            std::min(1.0, gy + half_mouth + fin_h)));
  return s;
}

Scene clutter_scene(Rng& rng) {
  Scene s;
  s.scene_type = SceneType::Clutter;
  const int n = 7 + static_cast<int>(rng.uniform_index(8));
  for (int i = 0; i < n; ++i) {
    const Scalar w = rng.uniform(0.14, 0.42);
    const Scalar h = rng.uniform(0.14, 0.42);
    const Scalar x = rng.uniform(-1.0, 1.0 - w);
    const Scalar y = rng.uniform(-1.0, 1.0 - h);
    s.obstacles.push_back(box(x, y, x + w, y + h));
  }
  return s;
}

Scene tabletop_scene(Rng& rng) {
  // Items standing on the bottom boundary, like a skyline; the band above
  // the tallest item stays free, so the scene is always connected.
  Scene s;
  s.scene_type = SceneType::Tabletop2D;
  const int n = 4 + static_cast<int>(rng.uniform_index(4));
  for (int i = 0; i < n; ++i) {
    const Scalar half_w = rng.uniform(0.07, 0.18);
    const Scalar cx = rng.uniform(-0.8, 0.8);
    const Scalar height = rng.uniform(0.35, 0.85);
    s.obstacles.push_back(
        box(cx - half_w, -1.0, cx + half_w, -1.0 + height));
  }
  return s;
}

Scalar workspace_diameter(const RobotModel& robot, const Scene& scene) {
  if (robot.kind == RobotKind::PointRobot)
    return (scene.bounds.max - scene.bounds.min).norm();
  Scalar reach = 0.0;
  for (Scalar l : robot.link_lengths) reach += l;
  return 2.0 * reach;
}

Vec2 workspace_point(const RobotModel& robot, const Vec& q) {
  const auto pts = forward_kinematics(robot, q);
  return pts.back();  // position / end effector
}

Vec random_config(const RobotModel& robot, Rng& rng) {
  Vec q(robot.config_dim());
  for (Index d = 0; d < q.size(); ++d)
    q[d] = rng.uniform(robot.config_min[d], robot.config_max[d]);
  return q;
}

bool inside_bounds(const Aabb& body, const Aabb& bounds) {
  return body.min.x() >= bounds.min.x() && body.min.y() >= bounds.min.y() &&
         body.max.x() <= bounds.max.x() && body.max.y() <= bounds.max.y();
}

// Wall scenes (corridor, cubby) consist only of {lower, upper} box pairs
// whose shared x-band splits the workspace; a and b straddle the scene iff
// they sit on opposite sides of every wall.
bool straddles_walls(const Scene& scene, const Vec2& a, const Vec2& b) {
  for (std::size_t i = 0; i + 1 < scene.obstacles.size(); i += 2) {
    const Scalar x0 = scene.obstacles[i].min.x();
    const Scalar x1 = scene.obstacles[i].max.x();
    const bool crossed = (a.x() < x0 && b.x() > x1) ||
                         (a.x() > x1 && b.x() < x0);
    if (!crossed) return false;
  }
  return true;
}

}  // namespace

Scene generate_scene(SceneType type, Rng& rng) {
  switch (type) {
    case SceneType::Corridor:
      return corridor_scene(rng);
    case SceneType::Cubby:
      return cubby_scene(rng);
    case SceneType::Clutter:
      return clutter_scene(rng);
    case SceneType::Tabletop2D:
      return tabletop_scene(rng);
  }
  throw std::invalid_argument("generate_scene: unknown scene type");
}

bool config_collision_free(const RobotModel& robot,
                           const Eigen::Ref<const Vec>& q,
                           const Scene& scene) {
  if (q.size() != robot.config_dim()) {
    throw std::invalid_argument("config_collision_free: dimension mismatch");
  }
  for (const Aabb& body : body_boxes(robot, q).boxes) {
    if (!inside_bounds(body, scene.bounds)) return false;
    for (const Aabb& o : scene.obstacles) {
      if (overlap_volume(body, o) > 0.0) return false;
    }
  }
  return true;
}

Problem generate_problem(const Scene& scene, const RobotModel& robot,
                         Rng& rng, const ProblemGenOptions& opts) {
  validate(robot);
  const Scalar min_sep =
      opts.separation_fraction * workspace_diameter(robot, scene);
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    const Vec qs = random_config(robot, rng);
    if (!config_collision_free(robot, qs, scene)) continue;
    const Vec qg = random_config(robot, rng);
    if (!config_collision_free(robot, qg, scene)) continue;
    if ((workspace_point(robot, qs) - workspace_point(robot, qg)).norm() <
        min_sep)
      continue;
    Problem p;
    p.q_start = qs;
    p.q_goal = qg;
    p.scene = scene;
    return p;
  }
  throw GenerationError(
      "generate_problem: no valid start/goal pair within the retry budget");
}

BenchmarkSuite generate_suite(const RobotModel& robot, int per_type,
                              std::uint64_t seed,
                              const ProblemGenOptions& opts) {
  if (per_type < 1)
    throw std::invalid_argument("generate_suite: per_type must be >= 1");
  const SceneType kinds[] = {SceneType::Corridor, SceneType::Cubby,
                             SceneType::Clutter, SceneType::Tabletop2D};
  BenchmarkSuite suite;
  suite.robot = robot;
  suite.seed = seed;
  suite.per_type = per_type;
  // Passage scenes only count as benchmark problems when the passage must
  // actually be threaded. For point robots we therefore require start and
  // goal on opposite sides of the walls; for arms the base often sits in a
  // wall's x-band, so the plain separation contract applies instead.
  const bool want_crossing = robot.kind == RobotKind::PointRobot;
  std::uint64_t index = 0;
  for (SceneType type : kinds) {
    const bool crossing = want_crossing && (type == SceneType::Corridor ||
                                            type == SceneType::Cubby);
    for (int i = 0; i < per_type; ++i, ++index) {
      Rng rng(derive_seed(seed, index));
      bool placed = false;
      // A pathological scene draw (e.g. clutter burying the workspace)
      // gets redrawn rather than failing the whole suite.
      for (int scene_try = 0; scene_try < 16 && !placed; ++scene_try) {
        const Scene scene = generate_scene(type, rng);
        try {
          for (int pair_try = 0; pair_try < 30 && !placed; ++pair_try) {
            Problem p = generate_problem(scene, robot, rng, opts);
            if (crossing &&
                !straddles_walls(scene, workspace_point(robot, p.q_start),
                                 workspace_point(robot, p.q_goal)))
              continue;
            suite.problems.push_back(std::move(p));
            suite.problem_types.push_back(type);
            placed = true;
          }
        } catch (const GenerationError&) {
        }
      }
      if (!placed)
        throw GenerationError("generate_suite: problem generation failed "
                              "repeatedly; scene parameters too dense");
    }
  }
  return suite;
}

namespace {

// Natural cubic spline through control points y(0..m-1); evaluated at
// parameter u in [0, m-1].
class NaturalSpline {
 public:
  explicit NaturalSpline(Mat control) : y_(std::move(control)) {
    const Index m = y_.rows();
    m2_ = Mat::Zero(m, y_.cols());
    if (m < 3) return;
    // Solve the tridiagonal system for interior second derivatives.
    Vec diag = Vec::Constant(m - 2, 4.0);
    Mat rhs(m - 2, y_.cols());
    for (Index i = 1; i + 1 < m; ++i)
      rhs.row(i - 1) =
          6.0 * (y_.row(i + 1) - 2.0 * y_.row(i) + y_.row(i - 1));
    for (Index i = 1; i < m - 2; ++i) {
      const Scalar f = 1.0 / diag[i - 1];
      diag[i] -= f;
      rhs.row(i) -= f * rhs.row(i - 1);
    }
    for (Index i = m - 3; i >= 0; --i) {  // back substitution
      Eigen::Matrix<Scalar, 1, Eigen::Dynamic> r = rhs.row(i);
      if (i + 2 <= m - 2) r -= m2_.row(i + 2);
      m2_.row(i + 1) = r / diag[i];
    }
  }

  Vec at(Scalar u) const {
    const Index m = y_.rows();
    const Scalar clamped = std::clamp(u, 0.0, static_cast<Scalar>(m - 1));
    Index i = std::min<Index>(static_cast<Index>(clamped), m - 2);
    const Scalar t = clamped - static_cast<Scalar>(i);
    const Scalar a = 1.0 - t;
    return (a * y_.row(i) + t * y_.row(i + 1) +
            ((a * a * a - a) * m2_.row(i) + (t * t * t - t) * m2_.row(i + 1)) /
                6.0)
        .transpose();
  }

 private:
  Mat y_;
  Mat m2_;  // second derivatives at the control points
};

}  // namespace

std::vector<Trajectory> generate_training_set(const RobotModel& robot, int n,
                                              Index waypoints, Rng& rng) {
  if (n < 1 || waypoints < 2)
    throw std::invalid_argument("generate_training_set: bad sizes");
  const Index D = robot.config_dim();
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(n));
  const int dense = 20 * static_cast<int>(waypoints);
  for (int i = 0; i < n; ++i) {
    const Index interior = 1 + static_cast<Index>(rng.uniform_index(3));
    Mat control(interior + 2, D);
    for (Index r = 0; r < control.rows(); ++r)
      for (Index d = 0; d < D; ++d)
        // Slightly inside the box so spline overshoot rarely leaves it.
        control(r, d) = rng.uniform(-0.85, 0.85);
    const NaturalSpline spline(std::move(control));
    const Scalar span = static_cast<Scalar>(interior + 1);

    // Uniform arc-length re-parameterization via a dense polyline.
    std::vector<Vec> pts(static_cast<std::size_t>(dense) + 1);
    std::vector<Scalar> arc(pts.size(), 0.0);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      pts[k] = spline.at(span * static_cast<Scalar>(k) / dense);
      if (k > 0) arc[k] = arc[k - 1] + (pts[k] - pts[k - 1]).norm();
    }
    const Scalar total = std::max(arc.back(), 1e-12);

    Trajectory tau(waypoints, D);
    std::size_t cursor = 0;
    for (Index l = 0; l < waypoints; ++l) {
      const Scalar frac =
          static_cast<Scalar>(l) / static_cast<Scalar>(waypoints - 1);
      const Scalar target = std::min(total, total * frac);
      while (cursor + 2 < arc.size() && arc[cursor + 1] < target) ++cursor;
      const Scalar seg = arc[cursor + 1] - arc[cursor];
      const Scalar t = seg > 0.0 ? (target - arc[cursor]) / seg : 0.0;
      tau.row(l) = ((1.0 - t) * pts[cursor] + t * pts[cursor + 1]).transpose();
    }
    out.push_back(tau.cwiseMax(-1.0).cwiseMin(1.0));
  }
  return out;
}

Trajectory normalize(const Trajectory& traj, const RobotModel& robot) {
  if (traj.cols() != robot.config_dim())
    throw std::invalid_argument("normalize: dimension mismatch");
  Trajectory out = traj;
  for (Index d = 0; d < traj.cols(); ++d) {
    const Scalar lo = robot.config_min[d], hi = robot.config_max[d];
    out.col(d) = (traj.col(d).array() - lo) * (2.0 / (hi - lo)) - 1.0;
  }
  return out;
}

Trajectory denormalize(const Trajectory& traj, const RobotModel& robot) {
  if (traj.cols() != robot.config_dim())
    throw std::invalid_argument("denormalize: dimension mismatch");
  Trajectory out = traj;
  for (Index d = 0; d < traj.cols(); ++d) {
    const Scalar lo = robot.config_min[d], hi = robot.config_max[d];
    out.col(d) = (traj.col(d).array() + 1.0) * (0.5 * (hi - lo)) + lo;
  }
  return out;
}

}  // namespace socdiff
