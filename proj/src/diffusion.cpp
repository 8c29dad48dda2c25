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

#include "socdiff/diffusion.hpp"

#include <cmath>
#include <stdexcept>

namespace socdiff {

const char* to_string(ScheduleKind k) {
  return k == ScheduleKind::Linear ? "linear" : "cosine";
}

ScheduleKind schedule_kind_from_string(const std::string& s) {
  if (s == "linear") return ScheduleKind::Linear;
  if (s == "cosine") return ScheduleKind::Cosine;
  throw std::invalid_argument("unknown schedule kind: " + s);
}

namespace {
void check_step(int t, const NoiseSchedule& schedule) {
  if (t < 1 || t > schedule.T)
    throw std::invalid_argument("diffusion: timestep out of [1, T]");
}
}  // namespace

NoiseSchedule make_schedule(int T, ScheduleKind kind) {
  if (T < 1) throw std::invalid_argument("make_schedule: T must be >= 1");
  NoiseSchedule s;
  s.T = T;
  s.beta.resize(T);
  if (kind == ScheduleKind::Linear) {
    const Scalar lo = 1e-4, hi = 2e-2;
    if (T == 1) {
      s.beta[0] = lo;
    } else {
      for (int t = 0; t < T; ++t)
        s.beta[t] = lo + (hi - lo) * static_cast<Scalar>(t) /
                             static_cast<Scalar>(T - 1);
    }
  } else {
    // Cosine alpha_bar construction, beta clipped to 0.999.
    const Scalar offset = 0.008;
    auto f = [&](Scalar t) {
      const Scalar x = (t / static_cast<Scalar>(T) + offset) / (1.0 + offset);
      const Scalar c = std::cos(x * M_PI / 2.0);
      return c * c;
    };
    const Scalar f0 = f(0.0);
    Scalar prev = 1.0;
    for (int t = 1; t <= T; ++t) {
      const Scalar abar = f(static_cast<Scalar>(t)) / f0;
      Scalar beta = 1.0 - abar / prev;
      beta = std::min(beta, 0.999);
      beta = std::max(beta, 1e-8);
      s.beta[t - 1] = beta;
      prev *= 1.0 - beta;
    }
  }
  s.alpha = 1.0 - s.beta.array();
  s.alpha_bar.resize(T);
  Scalar prod = 1.0;
  for (int t = 0; t < T; ++t) {
    prod *= s.alpha[t];
    s.alpha_bar[t] = prod;
  }
  return s;
}

Trajectory forward_sample(const Trajectory& tau0, int t,
                          const NoiseSchedule& schedule, Rng& rng) {
  check_step(t, schedule);
  const Scalar abar = schedule.alpha_bar_at(t);
  const Mat eps = rng.normal_matrix(tau0.rows(), tau0.cols());
  return std::sqrt(abar) * tau0 + std::sqrt(1.0 - abar) * eps;
}

Trajectory predict_tau0(const Trajectory& tau_t, const Mat& eps_hat, int t,
                        const NoiseSchedule& schedule) {
  check_step(t, schedule);
  if (eps_hat.rows() != tau_t.rows() || eps_hat.cols() != tau_t.cols())
    throw std::invalid_argument("predict_tau0: shape mismatch");
  const Scalar abar = schedule.alpha_bar_at(t);
  if (abar <= 0.0)
    throw std::domain_error("predict_tau0: alpha_bar is zero");
  return (tau_t - std::sqrt(1.0 - abar) * eps_hat) / std::sqrt(abar);
}

Trajectory reverse_mean(const Trajectory& tau_t, const Mat& eps_hat, int t,
                        const NoiseSchedule& schedule) {
  check_step(t, schedule);
  if (eps_hat.rows() != tau_t.rows() || eps_hat.cols() != tau_t.cols())
    throw std::invalid_argument("reverse_mean: shape mismatch");
  const Scalar beta = schedule.beta_at(t);
  const Scalar alpha = schedule.alpha_at(t);
  const Scalar abar = schedule.alpha_bar_at(t);
  return (tau_t - (beta / std::sqrt(1.0 - abar)) * eps_hat) /
         std::sqrt(alpha);
}

Trajectory reverse_step(const Trajectory& tau_t, const Mat& eps_hat, int t,
                        const NoiseSchedule& schedule, Rng& rng) {
  Trajectory mu = reverse_mean(tau_t, eps_hat, t, schedule);
  if (t == 1) return mu;
  const Scalar beta = schedule.beta_at(t);
  const Scalar abar = schedule.alpha_bar_at(t);
  const Scalar abar_prev = schedule.alpha_bar_at(t - 1);
  const Scalar sigma = std::sqrt(beta * (1.0 - abar_prev) / (1.0 - abar));
  mu += sigma * rng.normal_matrix(tau_t.rows(), tau_t.cols());
  return mu;
}

Trajectory fix_boundaries(const Trajectory& tau,
                          const Eigen::Ref<const Vec>& q_start,
                          const Eigen::Ref<const Vec>& q_goal) {
  if (q_start.size() != tau.cols() || q_goal.size() != tau.cols())
    throw std::invalid_argument("fix_boundaries: dimension mismatch");
  if (tau.rows() < 2)
    throw std::invalid_argument("fix_boundaries: need at least 2 waypoints");
  Trajectory out = tau;
  out.row(0) = q_start.transpose();
  out.row(tau.rows() - 1) = q_goal.transpose();
  return out;
}

}  // namespace socdiff
