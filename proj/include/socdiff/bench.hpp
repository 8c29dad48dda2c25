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

#ifndef SOCDIFF_BENCH_HPP_
#define SOCDIFF_BENCH_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "socdiff/planner.hpp"
#include "socdiff/svg.hpp"
#include "socdiff/world.hpp"

namespace socdiff {

// One setting of the ablation matrix: when guidance may activate, which
// trajectory the steering gradient is taken at, and whether it is on at all.
struct BenchCell {
  std::string activation;  // "dynamic" or "fixed_<step>"
  std::optional<int> fixed_start_step;
  GuidanceTarget target = GuidanceTarget::PredictedTau0;
  bool guided = true;
};

// The full 20-cell matrix for a horizon of T steps:
// {dynamic, fixed T/8, T/4, T/2, T} x {tau0, tau_t} x {guided, unguided}.
std::vector<BenchCell> bench_matrix(int T);

// Outcome of one cell on one problem.
struct BenchRow {
  BenchCell cell;
  int problem_index = 0;
  SceneType scene = SceneType::Corridor;
  bool success = false;
  Scalar cost = 0;
  int trigger_step = 0;
};

struct CellSummary {
  BenchCell cell;
  int n = 0;
  int successes = 0;
  Scalar success_rate_pct = 0;
  Scalar mean_cost = 0;
  Scalar mean_trigger = 0;
  /// Summed wall time of the planner runs behind this cell. Unguided
  /// cells share one run per problem and all report that run's time.
  double seconds = 0;
};

struct ScenePairKs {
  SceneType a;
  SceneType b;
  Scalar statistic = 0;
  Scalar critical = 0;  // alpha = 0.05
};

struct BenchReport {
  int T = 0;
  std::vector<BenchRow> rows;        // cell-major, problem-minor
  std::vector<CellSummary> cells;    // bench_matrix order
  std::vector<Series> trigger_by_scene;  // dynamic/tau0/guided cell
  std::vector<ScenePairKs> ks;           // all scene-type pairs
  std::vector<Scalar> trace_steps;       // t axis of the sample trace
  std::vector<Series> uniformity;        // U and smoothed U, problem 0
  double seconds = 0;
};

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
Scalar ks_statistic(std::vector<Scalar> a, std::vector<Scalar> b);

// Large-sample critical value at alpha = 0.05: 1.358 * sqrt((n+m)/(n*m)).
Scalar ks_critical_value(std::size_t n, std::size_t m);

// Runs the matrix over the suite with the suite's robot. `base` supplies K,
// T, schedule, guidance and cost parameters; its seed derives one planning
// seed per problem so every cell sees the same noise draws. `workers`
// parallelizes over problems; results are independent of the pool size.
// Unguided cells share one w=0 run per problem since the activation step
// and gradient target cannot influence a run that never applies a gradient.
BenchReport run_bench(const BenchmarkSuite& suite, const Denoiser& model,
                      const PlannerConfig& base, int workers = 1);

// Fixed-width table of per-cell summaries.
std::string format_summary_table(const BenchReport& report);

// Writes results.tsv, summary.tsv, summary.txt, ks.tsv,
// trigger_histograms.svg and uniformity_trace.svg under out_dir.
void write_bench_artifacts(const std::filesystem::path& out_dir,
                           const BenchReport& report);

}  // namespace socdiff

#endif  // SOCDIFF_BENCH_HPP_
