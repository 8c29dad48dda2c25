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

#include <memory>
#include <string>
#include <vector>

#include "socdiff/diffusion.hpp"
#include "socdiff/rng.hpp"
#include "socdiff/temporal_net.hpp"
#include "socdiff/types.hpp"

namespace socdiff {

enum class DenoiserKind { TemporalConvNet, AnalyticGaussian };

const char* to_string(DenoiserKind k);
DenoiserKind denoiser_kind_from_string(const std::string& s);

struct DenoiserSpec {
  DenoiserKind kind = DenoiserKind::TemporalConvNet;
  int hidden_channels = 64;
  int depth = 4;
  int time_embed_dim = 32;  // network fields ignored by AnalyticGaussian
};

void validate(const DenoiserSpec& spec);

/// Noise predictor interface shared by the trained network and the
/// analytic test oracle. Implementations are read-only at inference and
/// safe to call from concurrent chains.
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  /// Predicted noise for one trajectory at timestep t.
  virtual Mat predict_eps(const Trajectory& tau_t, int t,
                          const NoiseSchedule& schedule) const = 0;

  /// Batched prediction at a shared timestep; the base implementation
  /// loops, the network overrides it with one fused pass.
  virtual std::vector<Mat> predict_eps_batch(
      const std::vector<Trajectory>& taus, int t,
      const NoiseSchedule& schedule) const;

  virtual Index waypoints() const = 0;
  virtual Index dims() const = 0;
};

/// Gaussian trajectory prior N(mean, Sigma per dimension): every dimension
/// column shares the L x L covariance. Closed-form posterior makes this an
/// exact denoiser for oracle tests.
struct GaussianPrior {
  Mat mean;        // L x D
  Mat covariance;  // L x L symmetric positive definite
};

void validate(const GaussianPrior& prior);

/// Draw mean + chol(covariance) * z, one z column per dimension.
Trajectory sample_prior(const GaussianPrior& prior, Rng& rng);

/// Smoothness prior used by tests: squared-exponential kernel over
/// waypoint indices, k(i,j) = amplitude * exp(-(i-j)^2 / (2 len^2)) plus
/// jitter * I for numerical positive definiteness.
Mat rbf_covariance(Index L, Scalar length_scale, Scalar amplitude,
                   Scalar jitter = 1e-8);

/// Exact conditional expectation E[eps | tau_t] under the Gaussian prior:
/// with tau_t = sqrt(abar) tau0 + sqrt(1-abar) eps, each column satisfies
/// E[eps | tau_t] = sqrt(1-abar) * M^{-1} (tau_t - sqrt(abar) mu),
/// M = abar * Sigma + (1-abar) * I.
class AnalyticGaussianDenoiser final : public Denoiser {
 public:
  explicit AnalyticGaussianDenoiser(GaussianPrior prior);

  Mat predict_eps(const Trajectory& tau_t, int t,
                  const NoiseSchedule& schedule) const override;
  Index waypoints() const override { return prior_.mean.rows(); }
  Index dims() const override { return prior_.mean.cols(); }
  const GaussianPrior& prior() const { return prior_; }

 private:
  GaussianPrior prior_;
};

/// Trained temporal conv-net denoiser. Weights are float for speed; the
/// public interface stays in double.
class TemporalDenoiser final : public Denoiser {
 public:
  using Net = TemporalNet<float>;

  /// Fresh random initialization for an (L, D) trajectory shape.
  TemporalDenoiser(const DenoiserSpec& spec, Index waypoints, Index dims,
                   std::uint64_t init_seed);

  Mat predict_eps(const Trajectory& tau_t, int t,
                  const NoiseSchedule& schedule) const override;
  std::vector<Mat> predict_eps_batch(const std::vector<Trajectory>& taus,
                                     int t, const NoiseSchedule& schedule)
      const override;

  Index waypoints() const override { return L_; }
  Index dims() const override { return static_cast<Index>(net_.D); }

  const DenoiserSpec& spec() const { return spec_; }
  Net& net() { return net_; }
  const Net& net() const { return net_; }

 private:
  DenoiserSpec spec_;
  Index L_;
  Net net_;
};

struct TrainConfig {
  int steps = 3000;
  int batch_size = 256;
  Scalar learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& cfg);

/// Standard epsilon-MSE denoising objective: per step draw a batch of
/// (trajectory, timestep, noise), minimize mean squared error between the
/// injected and the predicted noise with Adam. Returns the per-step loss.
/// Deterministic for a fixed seed: all random draws come from one stream
/// in a fixed order.
std::vector<Scalar> train(TemporalDenoiser& model,
                          const std::vector<Trajectory>& dataset,
                          const NoiseSchedule& schedule,
                          const TrainConfig& cfg);

}  // namespace socdiff
