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

#include "socdiff/denoiser.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace socdiff {

const char* to_string(DenoiserKind k) {
  return k == DenoiserKind::TemporalConvNet ? "temporal_conv_net"
                                            : "analytic_gaussian";
}

DenoiserKind denoiser_kind_from_string(const std::string& s) {
  if (s == "temporal_conv_net") return DenoiserKind::TemporalConvNet;
  if (s == "analytic_gaussian") return DenoiserKind::AnalyticGaussian;
  throw std::invalid_argument("unknown denoiser kind: " + s);
}

void validate(const DenoiserSpec& spec) {
  if (spec.kind == DenoiserKind::AnalyticGaussian) return;
  if (spec.hidden_channels < 1 || spec.depth < 1 || spec.time_embed_dim < 2)
    throw std::invalid_argument("DenoiserSpec: sizes must be positive");
}

void validate(const GaussianPrior& prior) {
  const Index L = prior.mean.rows();
  if (L < 1 || prior.mean.cols() < 1)
    throw std::invalid_argument("GaussianPrior: empty mean");
  if (prior.covariance.rows() != L || prior.covariance.cols() != L)
    throw std::invalid_argument("GaussianPrior: covariance must be L x L");
  const Scalar asym =
      (prior.covariance - prior.covariance.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, prior.covariance.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("GaussianPrior: covariance not symmetric");
  if (Eigen::LLT<Mat>(prior.covariance).info() != Eigen::Success)
    throw std::invalid_argument(
        "GaussianPrior: covariance not positive definite");
}

Trajectory sample_prior(const GaussianPrior& prior, Rng& rng) {
  validate(prior);
  const Eigen::LLT<Mat> llt(prior.covariance);
  const Mat z = rng.normal_matrix(prior.mean.rows(), prior.mean.cols());
  return prior.mean + llt.matrixL() * z;
}

Mat rbf_covariance(Index L, Scalar length_scale, Scalar amplitude,
                   Scalar jitter) {
  if (L < 1 || !(length_scale > 0.0) || !(amplitude > 0.0))
    throw std::invalid_argument("rbf_covariance: bad parameters");
  Mat k(L, L);
  for (Index i = 0; i < L; ++i)
    for (Index j = 0; j < L; ++j) {
      const Scalar d = static_cast<Scalar>(i - j) / length_scale;
      k(i, j) = amplitude * std::exp(-0.5 * d * d);
    }
  k.diagonal().array() += jitter;
  return k;
}

std::vector<Mat> Denoiser::predict_eps_batch(
    const std::vector<Trajectory>& taus, int t,
    const NoiseSchedule& schedule) const {
  std::vector<Mat> out;
  out.reserve(taus.size());
  for (const Trajectory& tau : taus)
    out.push_back(predict_eps(tau, t, schedule));
  return out;
}

AnalyticGaussianDenoiser::AnalyticGaussianDenoiser(GaussianPrior prior)
    : prior_(std::move(prior)) {
  validate(prior_);
}

Mat AnalyticGaussianDenoiser::predict_eps(const Trajectory& tau_t, int t,
                                          const NoiseSchedule& schedule)
    const {
  if (t < 1 || t > schedule.T)
    throw std::invalid_argument("predict_eps: timestep out of [1, T]");
  if (tau_t.rows() != prior_.mean.rows() ||
      tau_t.cols() != prior_.mean.cols())
    throw std::invalid_argument("predict_eps: shape mismatch with prior");
  const Scalar abar = schedule.alpha_bar_at(t);
  const Index L = prior_.mean.rows();
  // tau_t | tau0 ~ marginal of the forward chain; jointly Gaussian with
  // the prior, so E[eps | tau_t] solves one SPD system per dimension.
  Mat m = abar * prior_.covariance;
  m.diagonal().array() += 1.0 - abar;
  const Eigen::LDLT<Mat> solver(m);
  const Mat centered = tau_t - std::sqrt(abar) * prior_.mean;
  return std::sqrt(1.0 - abar) * solver.solve(centered);
}

TemporalDenoiser::TemporalDenoiser(const DenoiserSpec& spec, Index waypoints,
                                   Index dims, std::uint64_t init_seed)
    : spec_(spec), L_(waypoints) {
  validate(spec);
  if (spec.kind != DenoiserKind::TemporalConvNet)
    throw std::invalid_argument(
        "TemporalDenoiser: spec kind must be temporal_conv_net");
  if (waypoints < 2 || dims < 1)
    throw std::invalid_argument("TemporalDenoiser: bad trajectory shape");
  Rng rng(init_seed);
  net_.init(static_cast<int>(dims), spec.hidden_channels,
            spec.time_embed_dim, spec.depth, /*kernel=*/5, rng);
}

Mat TemporalDenoiser::predict_eps(const Trajectory& tau_t, int t,
                                  const NoiseSchedule& schedule) const {
  return predict_eps_batch({tau_t}, t, schedule)[0];
}

std::vector<Mat> TemporalDenoiser::predict_eps_batch(
    const std::vector<Trajectory>& taus, int t,
    const NoiseSchedule& schedule) const {
  if (t < 1 || t > schedule.T)
    throw std::invalid_argument("predict_eps: timestep out of [1, T]");
  const int B = static_cast<int>(taus.size());
  if (B == 0) return {};
  const int L = static_cast<int>(L_);
  const int D = net_.D;
  for (const Trajectory& tau : taus)
    if (tau.rows() != L_ || tau.cols() != D)
      throw std::invalid_argument("predict_eps: shape mismatch with model");

  Net::MatT x0(D, static_cast<Index>(B) * L);
  for (int b = 0; b < B; ++b)
    x0.middleCols(b * L, L) = taus[static_cast<std::size_t>(b)]
                                  .transpose()
                                  .cast<float>();
  const std::vector<int> ts(static_cast<std::size_t>(B), t);
  Net::Trace tr;
  const Net::MatT& out = net_.forward(x0, ts, B, L, tr);

  std::vector<Mat> eps(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b)
    eps[static_cast<std::size_t>(b)] =
        out.middleCols(b * L, L).transpose().cast<Scalar>();
  return eps;
}

void validate(const TrainConfig& cfg) {
  if (cfg.steps < 1 || cfg.batch_size < 1)
    throw std::invalid_argument("TrainConfig: steps and batch must be >= 1");
  if (!(cfg.learning_rate >= 0.0))
    throw std::invalid_argument("TrainConfig: learning rate must be >= 0");
}

std::vector<Scalar> train(TemporalDenoiser& model,
                          const std::vector<Trajectory>& dataset,
                          const NoiseSchedule& schedule,
                          const TrainConfig& cfg) {
  validate(cfg);
  if (dataset.empty())
    throw std::invalid_argument("train: empty dataset");
  const int L = static_cast<int>(model.waypoints());
  const int D = static_cast<int>(model.dims());
  for (const Trajectory& tau : dataset)
    if (tau.rows() != L || tau.cols() != D)
      throw std::invalid_argument("train: dataset shape mismatch with model");

  using Net = TemporalDenoiser::Net;
  Net& net = model.net();
  AdamOptimizer<float> opt(net, cfg.learning_rate);
  Rng rng(derive_seed(cfg.seed, 0x7261696eULL));  // independent train stream

  const int B = cfg.batch_size;
  std::vector<Scalar> losses;
  losses.reserve(static_cast<std::size_t>(cfg.steps));
  Net::Trace tr;
  Net::Grads grads;
  grads.init_like(net);
  std::vector<int> ts(static_cast<std::size_t>(B));
  Net::MatT x(net.D, static_cast<Index>(B) * L);
  Net::MatT eps(net.D, static_cast<Index>(B) * L);
  Mat noise(L, D);

  for (int step = 0; step < cfg.steps; ++step) {
    // Fixed draw order per sample: index, timestep, then noise.
    for (int b = 0; b < B; ++b) {
      const auto idx = rng.uniform_index(dataset.size());
      const int t = 1 + static_cast<int>(
                            rng.uniform_index(static_cast<std::uint64_t>(
                                schedule.T)));
      ts[static_cast<std::size_t>(b)] = t;
      rng.fill_normal(noise);
      const Scalar abar = schedule.alpha_bar_at(t);
      const Mat tau_t = std::sqrt(abar) * dataset[idx] +
                        std::sqrt(1.0 - abar) * noise;
      x.middleCols(b * L, L) = tau_t.transpose().cast<float>();
      eps.middleCols(b * L, L) = noise.transpose().cast<float>();
    }

    const Net::MatT& out = net.forward(x, ts, B, L, tr);
    const Net::MatT diff = out - eps;
    const Scalar n = static_cast<Scalar>(diff.size());
    losses.push_back(static_cast<Scalar>(diff.squaredNorm()) / n);

    grads.init_like(net);  // zero
    const Net::MatT dout = (2.0f / static_cast<float>(n)) * diff;
    net.backward(tr, dout, grads);
    opt.step(net, grads);
  }
  return losses;
}

}  // namespace socdiff
