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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "socdiff/costs.hpp"
#include "socdiff/geometry.hpp"
#include "socdiff/rng.hpp"
#include "socdiff/world.hpp"
#include "support/fd_oracle.hpp"

using namespace socdiff;

namespace {

Aabb box(Scalar x0, Scalar y0, Scalar x1, Scalar y1) {
  return Aabb{Vec2(x0, y0), Vec2(x1, y1)};
}

Scene empty_scene() { return Scene{}; }

Scene scene_of(std::vector<Aabb> obstacles) {
  Scene s;
  s.obstacles = std::move(obstacles);
  return s;
}

// Straightforward scalar re-implementation of the soft-overlap cost,
// used as an oracle against the vectorized production path.
Scalar naive_config_cost(const RobotModel& robot, const Vec& q,
                         const Scene& scene, Scalar margin, Scalar delta) {
  Scalar total = 0.0;
  for (const Aabb& body : body_boxes(robot, q).boxes) {
    for (const Aabb& o : scene.obstacles) {
      const Scalar ex = std::min(body.max.x(), o.max.x() + margin) -
                        std::max(body.min.x(), o.min.x() - margin);
      const Scalar ey = std::min(body.max.y(), o.max.y() + margin) -
                        std::max(body.min.y(), o.min.y() - margin);
      total += smooth_hinge(ex, delta) * smooth_hinge(ey, delta);
    }
  }
  return total;
}

Scalar naive_iv(const Trajectory& traj, const Scene& scene,
                const RobotModel& robot, Scalar margin, Scalar eps) {
  const Scalar delta = std::sqrt(eps);
  Scalar total = 0.0;
  for (Index l = 0; l < traj.rows(); ++l)
    total += naive_config_cost(robot, traj.row(l).transpose(), scene, margin,
                               delta);
  return total;
}

Scalar naive_sv(const Trajectory& traj, const Scene& scene,
                const RobotModel& robot, Scalar margin, int s, Scalar eps) {
  const Scalar delta = std::sqrt(eps);
  Scalar total = 0.0;
  for (Index seg = 0; seg + 1 < traj.rows(); ++seg) {
    for (int m = 0; m < s; ++m) {
      const Scalar a = (m + 0.5) / s;
      const Vec q =
          ((1.0 - a) * traj.row(seg) + a * traj.row(seg + 1)).transpose();
      total += naive_config_cost(robot, q, scene, margin, delta) / s;
    }
  }
  return total;
}

// Shared with the acceptance harness; see tests/support/fd_oracle.hpp.
Scene random_scene(Rng& rng, int n_obstacles) {
  return socdiff::testing::fd_random_scene(rng, n_obstacles);
}

Trajectory random_traj(Rng& rng, Index L, const RobotModel& robot) {
  return socdiff::testing::fd_random_traj(rng, L, robot);
}

}  // namespace

TEST_CASE("smooth_hinge: exact outside the band, C1 inside") {
  const Scalar delta = 0.01;
  CHECK(smooth_hinge(-0.5, delta) == 0.0);
  CHECK(smooth_hinge(0.0, delta) == 0.0);
  CHECK(smooth_hinge(delta, delta) == delta);
  CHECK(smooth_hinge(0.3, delta) == 0.3);
  CHECK(smooth_hinge_deriv(-0.1, delta) == 0.0);
  CHECK(smooth_hinge_deriv(0.5, delta) == 1.0);
  // Continuity of value and derivative at both band edges.
  CHECK(smooth_hinge(1e-12, delta) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(smooth_hinge_deriv(1e-9, delta) == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(smooth_hinge(delta - 1e-12, delta) == doctest::Approx(delta));
  CHECK(smooth_hinge_deriv(delta - 1e-9, delta) == doctest::Approx(1.0));
  // Inside the band: below the identity, derivative matches FD.
  for (Scalar x : {0.002, 0.005, 0.008}) {
    CHECK(smooth_hinge(x, delta) <= x);
    CHECK(smooth_hinge(x, delta) > 0.0);
    const Scalar h = 1e-8;
    const Scalar fd =
        (smooth_hinge(x + h, delta) - smooth_hinge(x - h, delta)) / (2 * h);
    CHECK(smooth_hinge_deriv(x, delta) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("iv_cost: hand value for a contained point robot") {
  const RobotModel robot = RobotModel::point(0.05);
  Trajectory traj(1, 2);
  traj << 0.0, 0.0;
  const Scene scene = scene_of({box(-1, -1, 1, 1)});
  CHECK(iv_cost(traj, scene, robot, 0.0) == doctest::Approx(0.01));
}

TEST_CASE("iv_cost: zero for empty scenes and separated trajectories") {
  const RobotModel robot = RobotModel::point(0.05);
  Trajectory traj(3, 2);
  traj << -0.9, -0.9, 0.0, -0.9, 0.9, -0.9;
  CHECK(iv_cost(traj, empty_scene(), robot, 0.0) == 0.0);
  const Scene scene = scene_of({box(-0.5, 0.5, 0.5, 0.9)});
  CHECK(iv_cost(traj, scene, robot, 0.1) == 0.0);
}

TEST_CASE("iv_cost: monotone in the margin") {
  const RobotModel robot = RobotModel::point(0.05);
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    const Scene scene = random_scene(rng, 3);
    const Trajectory traj = random_traj(rng, 5, robot);
    Scalar prev = -1.0;
    for (Scalar margin : {0.0, 0.02, 0.05, 0.08, 0.12}) {
      const Scalar v = iv_cost(traj, scene, robot, margin);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("iv/sv: dimension and argument validation") {
  const RobotModel robot = RobotModel::point();
  Trajectory bad(2, 3);
  bad.setZero();
  CHECK_THROWS_AS(iv_cost(bad, empty_scene(), robot, 0.0),
                  std::invalid_argument);
  Trajectory ok(2, 2);
  ok.setZero();
  CHECK_THROWS_AS(iv_cost(ok, empty_scene(), robot, -0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(sv_cost(ok, empty_scene(), robot, 0.0, 0),
                  std::invalid_argument);
  Trajectory one(1, 2);
  one.setZero();
  CHECK_THROWS_AS(sv_cost(one, empty_scene(), robot, 0.0, 2),
                  std::invalid_argument);
  CostParams bad_params;
  bad_params.smoothing_eps = 0.0;
  CHECK_THROWS_AS(validate(bad_params), std::invalid_argument);
}

TEST_CASE("sv_cost: matches the naive midpoint evaluation") {
  Rng rng(77);
  const RobotModel pt = RobotModel::point(0.05);
  const RobotModel arm = RobotModel::arm({0.45, 0.35, 0.3});
  for (int i = 0; i < 30; ++i) {
    const Scene scene = random_scene(rng, 4);
    for (const RobotModel& robot : {pt, arm}) {
      const Trajectory traj = random_traj(rng, 5, robot);
      for (int s : {1, 2, 3, 8}) {
        const Scalar a = sv_cost(traj, scene, robot, 0.02, s);
        const Scalar b = naive_sv(traj, scene, robot, 0.02, s, 1e-4);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
      }
      const Scalar a = iv_cost(traj, scene, robot, 0.05);
      const Scalar b = naive_iv(traj, scene, robot, 0.05, 1e-4);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("sv_cost: subsamples=1 evaluates segment midpoints") {
  const RobotModel robot = RobotModel::point(0.05);
  const Scene scene = scene_of({box(-0.3, -0.3, 0.3, 0.3)});
  Trajectory traj(3, 2);
  traj << -0.6, 0.0, 0.0, 0.0, 0.6, 0.0;
  const Scalar delta = std::sqrt(kDefaultSmoothingEps);
  Scalar expect = 0.0;
  for (Index seg = 0; seg < 2; ++seg) {
    const Vec q = (0.5 * (traj.row(seg) + traj.row(seg + 1))).transpose();
    expect += naive_config_cost(robot, q, scene, 0.0, delta);
  }
  CHECK(sv_cost(traj, scene, robot, 0.0, 1) == doctest::Approx(expect));
}

TEST_CASE("sv_cost: agrees with a dense Riemann approximation within 5%") {
  const RobotModel robot = RobotModel::point(0.05);
  const Scene scene = scene_of({box(-0.5, -0.5, 0.5, 0.5)});
  Trajectory traj(2, 2);
  traj << -0.95, -0.13, 0.9, 0.21;  // crosses the obstacle obliquely
  const Scalar dense = naive_sv(traj, scene, robot, 0.0, 10000, 1e-4);
  REQUIRE(dense > 0.0);
  for (int s : {4, 8}) {
    const Scalar v = sv_cost(traj, scene, robot, 0.0, s);
    CHECK(v == doctest::Approx(dense).epsilon(0.05));
  }
}

TEST_CASE("sum_of_costs: totals equal independently computed terms") {
  Rng rng(123);
  const CostParams params;
  const RobotModel robot = RobotModel::point(0.05);
  const Scene scene = random_scene(rng, 4);
  const Trajectory traj = random_traj(rng, 6, robot);
  const CostReport report = sum_of_costs(traj, scene, robot, params);
  Scalar total = 0.0;
  for (std::size_t l = 0; l < params.iv_margins.size(); ++l) {
    const Scalar v = iv_cost(traj, scene, robot, params.iv_margins[l]);
    CHECK(report.iv_terms[static_cast<Index>(l)] == doctest::Approx(v));
    total += v;
  }
  for (std::size_t j = 0; j < params.sv_margins.size(); ++j) {
    const Scalar v = sv_cost(traj, scene, robot, params.sv_margins[j],
                             params.sv_subsamples[j]);
    CHECK(report.sv_terms[static_cast<Index>(j)] == doctest::Approx(v));
    total += v;
  }
  CHECK(report.total == doctest::Approx(total).epsilon(1e-12));
  CHECK((report.iv_terms.array() >= 0.0).all());
  CHECK((report.sv_terms.array() >= 0.0).all());
}

TEST_CASE("sum_of_costs: empty scene gives zero total and zero gradient") {
  const RobotModel robot = RobotModel::point();
  Trajectory traj(4, 2);
  traj << -0.5, -0.5, -0.2, 0.1, 0.2, -0.1, 0.5, 0.5;
  const CostReport report = sum_of_costs(traj, empty_scene(), robot, {});
  CHECK(report.total == 0.0);
  CHECK(report.gradient.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sum_of_costs: gradient is the sum of per-term gradients") {
  Rng rng(55);
  const CostParams params;
  for (const RobotModel& robot :
       {RobotModel::point(0.05), RobotModel::arm({0.5, 0.4, 0.3})}) {
    const Scene scene = random_scene(rng, 3);
    const Trajectory traj = random_traj(rng, 5, robot);
    const Mat total = cost_gradient(traj, scene, robot, params);
    Mat acc = Mat::Zero(traj.rows(), traj.cols());
    for (Scalar m : params.iv_margins)
      iv_cost(traj, scene, robot, m, params.smoothing_eps, &acc);
    for (std::size_t j = 0; j < params.sv_margins.size(); ++j)
      sv_cost(traj, scene, robot, params.sv_margins[j],
              params.sv_subsamples[j], params.smoothing_eps, &acc);
    CHECK((total - acc).cwiseAbs().maxCoeff() <
          1e-10 * std::max(1.0, acc.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("cost_gradient: zero by symmetry at an obstacle center") {
  const RobotModel robot = RobotModel::point(0.05);
  const Scene scene = scene_of({box(-0.4, -0.4, 0.4, 0.4)});
  Trajectory traj(2, 2);
  traj.setZero();  // both waypoints at the obstacle center
  const Mat g = cost_gradient(traj, scene, robot, {});
  CHECK(g.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("cost_gradient: matches finite differences (point robot)") {
  const auto res = socdiff::testing::run_fd_oracle(RobotModel::point(0.05), 25, 1001);
  CHECK(res.sampling_ok);
  CHECK(res.triples == 25);
  CHECK(res.component_failures == 0);
}

TEST_CASE("cost_gradient: matches finite differences (planar arm)") {
  const auto res =
      socdiff::testing::run_fd_oracle(RobotModel::arm({0.45, 0.35, 0.3}), 25, 2002);
  CHECK(res.sampling_ok);
  CHECK(res.triples == 25);
  CHECK(res.component_failures == 0);
}

TEST_CASE("cost_gradient: a small descent step reduces the cost") {
  Rng rng(404);
  const CostParams params;
  const RobotModel robot = RobotModel::point(0.05);
  int checked = 0;
  for (int i = 0; i < 50 && checked < 10; ++i) {
    const Scene scene = random_scene(rng, 4);
    const Trajectory traj = random_traj(rng, 6, robot);
    const CostReport r = sum_of_costs(traj, scene, robot, params);
    if (r.total < 1e-6 || r.gradient.norm() < 1e-6) continue;
    const Trajectory stepped = traj - 1e-3 * r.gradient;
    CHECK(sum_of_costs(stepped, scene, robot, params, false).total < r.total);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("coverage: margins catch a grazing pass that margin 0 misses") {
  const RobotModel robot = RobotModel::point(0.05);
  // Obstacle edge at x = -0.2; path at x = -0.1 leaves a 0.05 m gap at
  // margin 0 but overlaps once inflated by 0.08 or more.
  const Scene scene = scene_of({box(-0.8, -0.8, -0.2, 0.8)});
  Trajectory traj(3, 2);
  traj << -0.1, -0.8, -0.1, 0.0, -0.1, 0.8;
  const CostReport r = sum_of_costs(traj, scene, robot, {});
  CHECK(r.iv_terms[0] == 0.0);           // margin 0
  CHECK(r.iv_terms[4] > 0.0);            // margin 0.12
  CHECK(r.sv_terms[0] == 0.0);
  CHECK(r.sv_terms[6] > 0.0);
  CHECK(r.total > 0.0);
}
