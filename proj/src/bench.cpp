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

#include "socdiff/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "socdiff/io.hpp"
#include "socdiff/parallel.hpp"
#include "socdiff/rng.hpp"

namespace socdiff {

namespace {

constexpr std::array<SceneType, 4> kSceneTypes = {
    SceneType::Corridor, SceneType::Cubby, SceneType::Clutter,
    SceneType::Tabletop2D};

// Per-problem outcome of one planner run.
struct RunOut {
  bool success = false;
  Scalar cost = 0;
  int trigger = 0;
  double seconds = 0;
};

std::string fixed_label(int step) {
  return "fixed_" + std::to_string(step);
}

}  // namespace

std::vector<BenchCell> bench_matrix(int T) {
  if (T < 8) throw std::invalid_argument("bench_matrix: T must be >= 8");
  std::vector<BenchCell> cells;
  std::vector<std::optional<int>> starts = {std::nullopt, T / 8, T / 4, T / 2,
                                            T};
  for (const auto& start : starts) {
    for (GuidanceTarget target :
         {GuidanceTarget::PredictedTau0, GuidanceTarget::NoisyTauT}) {
      for (bool guided : {true, false}) {
        BenchCell c;
        c.activation = start ? fixed_label(*start) : "dynamic";
        c.fixed_start_step = start;
        c.target = target;
        c.guided = guided;
        cells.push_back(c);
      }
    }
  }
  return cells;
}

Scalar ks_statistic(std::vector<Scalar> a, std::vector<Scalar> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const Scalar n = static_cast<Scalar>(a.size());
  const Scalar m = static_cast<Scalar>(b.size());
  std::size_t i = 0, j = 0;
  Scalar d = 0;
  while (i < a.size() && j < b.size()) {
    const Scalar v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<Scalar>(i) / n -
                             static_cast<Scalar>(j) / m));
  }
  return d;
}

Scalar ks_critical_value(std::size_t n, std::size_t m) {
  if (n == 0 || m == 0)
    throw std::invalid_argument("ks_critical_value: empty sample");
  const Scalar fn = static_cast<Scalar>(n);
  const Scalar fm = static_cast<Scalar>(m);
  return 1.358 * std::sqrt((fn + fm) / (fn * fm));
}

BenchReport run_bench(const BenchmarkSuite& suite, const Denoiser& model,
                      const PlannerConfig& base, int workers) {
  if (suite.problems.empty())
    throw std::invalid_argument("run_bench: empty suite");
  if (suite.problem_types.size() != suite.problems.size())
    throw std::invalid_argument("run_bench: suite type list out of sync");
  validate(base);

  const auto t_start = std::chrono::steady_clock::now();
  const std::size_t N = suite.problems.size();
  const std::vector<BenchCell> cells = bench_matrix(base.T);

  // 11 distinct runs per problem: five activation settings times two
  // gradient targets when guided, plus a single unguided (w = 0) run. With
  // w = 0 the guided update is the identity, so neither the activation
  // step nor the gradient target can change the trajectories; dedup keeps
  // the unguided half of the matrix from doubling the bench cost.
  constexpr int kGuidedRuns = 10;
  constexpr int kRunsPerProblem = kGuidedRuns + 1;
  const std::vector<std::optional<int>> starts = {
      std::nullopt, base.T / 8, base.T / 4, base.T / 2, base.T};

  std::vector<std::array<RunOut, kRunsPerProblem>> outs(N);
  std::vector<StepTrace> trace0;

  parallel_for(N, workers, [&](std::size_t p) {
    const Problem& problem = suite.problems[p];
    PlannerConfig cfg = base;
    cfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(p));
    cfg.workers = 1;
    for (int r = 0; r < kRunsPerProblem; ++r) {
      if (r < kGuidedRuns) {
        cfg.fixed_start_step = starts[static_cast<std::size_t>(r / 2)];
        cfg.guidance_target = (r % 2 == 0) ? GuidanceTarget::PredictedTau0
                                           : GuidanceTarget::NoisyTauT;
        cfg.guidance.w = base.guidance.w;
        cfg.skip_unused_cost_eval = false;
      } else {
        cfg.fixed_start_step.reset();
        cfg.guidance_target = GuidanceTarget::PredictedTau0;
        cfg.guidance.w = 0;
        cfg.skip_unused_cost_eval = true;
      }
      const auto run_start = std::chrono::steady_clock::now();
      PlanResult res = plan(problem, suite.robot, model, cfg);
      RunOut& out = outs[p][static_cast<std::size_t>(r)];
      out.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - run_start)
                        .count();
      out.success = res.success;
      out.cost = res.best_cost;
      out.trigger = res.trigger_step.value_or(0);
      if (p == 0 && r == 0) trace0 = std::move(res.trace);
    }
  });

  BenchReport report;
  report.T = base.T;
  report.rows.reserve(cells.size() * N);
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const BenchCell& cell = cells[ci];
    const int a = static_cast<int>(ci) / 4;
    const int tgt = (static_cast<int>(ci) / 2) % 2;
    const int run = cell.guided ? a * 2 + tgt : kGuidedRuns;
    CellSummary sum;
    sum.cell = cell;
    for (std::size_t p = 0; p < N; ++p) {
      const RunOut& out = outs[p][static_cast<std::size_t>(run)];
      BenchRow row;
      row.cell = cell;
      row.problem_index = static_cast<int>(p);
      row.scene = suite.problem_types[p];
      row.success = out.success;
      row.cost = out.cost;
      // Fixed-activation cells activate at their configured step by
      // definition; the shared unguided run only carries the dynamic one.
      row.trigger_step =
          cell.fixed_start_step ? *cell.fixed_start_step : out.trigger;
      sum.n += 1;
      sum.successes += row.success ? 1 : 0;
      sum.mean_cost += row.cost;
      sum.mean_trigger += static_cast<Scalar>(row.trigger_step);
      sum.seconds += out.seconds;
      report.rows.push_back(std::move(row));
    }
    sum.success_rate_pct = 100.0 * sum.successes / sum.n;
    sum.mean_cost /= sum.n;
    sum.mean_trigger /= sum.n;
    report.cells.push_back(std::move(sum));
  }

  // Scene-conditioned trigger distributions from the dynamic guided
  // tau0 cell (run 0).
  std::array<std::vector<Scalar>, kSceneTypes.size()> by_scene;
  for (std::size_t p = 0; p < N; ++p) {
    const std::size_t at = static_cast<std::size_t>(
        std::find(kSceneTypes.begin(), kSceneTypes.end(),
                  suite.problem_types[p]) -
        kSceneTypes.begin());
    by_scene[at].push_back(static_cast<Scalar>(outs[p][0].trigger));
  }
  for (std::size_t s = 0; s < kSceneTypes.size(); ++s) {
    if (by_scene[s].empty()) continue;
    report.trigger_by_scene.push_back(
        Series{to_string(kSceneTypes[s]), by_scene[s]});
  }
  for (std::size_t s = 0; s < kSceneTypes.size(); ++s) {
    for (std::size_t u = s + 1; u < kSceneTypes.size(); ++u) {
      if (by_scene[s].empty() || by_scene[u].empty()) continue;
      ScenePairKs pair;
      pair.a = kSceneTypes[s];
      pair.b = kSceneTypes[u];
      pair.statistic = ks_statistic(by_scene[s], by_scene[u]);
      pair.critical = ks_critical_value(by_scene[s].size(), by_scene[u].size());
      report.ks.push_back(pair);
    }
  }

  report.trace_steps.reserve(trace0.size());
  Series u_raw{"U", {}};
  Series u_ema{"U_ema", {}};
  for (const StepTrace& step : trace0) {
    report.trace_steps.push_back(static_cast<Scalar>(step.t));
    u_raw.values.push_back(step.U);
    u_ema.values.push_back(step.U_smooth);
  }
  report.uniformity = {std::move(u_raw), std::move(u_ema)};

  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return report;
}

std::string format_summary_table(const BenchReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-6s %-8s %9s %12s %13s\n",
                "activation", "target", "guided", "success%", "mean_cost",
                "mean_trigger");
  out << line;
  for (const CellSummary& c : report.cells) {
    std::snprintf(line, sizeof(line), "%-12s %-6s %-8s %9.2f %12.5f %13.2f\n",
                  c.cell.activation.c_str(), to_string(c.cell.target),
                  c.cell.guided ? "yes" : "no", c.success_rate_pct, c.mean_cost,
                  c.mean_trigger);
    out << line;
  }
  return out.str();
}

void write_bench_artifacts(const std::filesystem::path& out_dir,
                           const BenchReport& report) {
  std::filesystem::create_directories(out_dir);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(report.rows.size());
  for (const BenchRow& r : report.rows) {
    rows.push_back({r.cell.activation, to_string(r.cell.target),
                    r.cell.guided ? "1" : "0", std::to_string(r.problem_index),
                    to_string(r.scene), r.success ? "1" : "0",
                    format_number(r.cost), std::to_string(r.trigger_step)});
  }
  write_tsv(out_dir / "results.tsv",
            {"activation", "target", "guided", "problem", "scene", "success",
             "cost", "trigger_step"},
            rows);

  rows.clear();
  for (const CellSummary& c : report.cells) {
    rows.push_back({c.cell.activation, to_string(c.cell.target),
                    c.cell.guided ? "1" : "0", std::to_string(c.n),
                    std::to_string(c.successes),
                    format_number(c.success_rate_pct),
                    format_number(c.mean_cost), format_number(c.mean_trigger)});
  }
  write_tsv(out_dir / "summary.tsv",
            {"activation", "target", "guided", "n", "successes",
             "success_rate_pct", "mean_cost", "mean_trigger"},
            rows);

  rows.clear();
  for (const ScenePairKs& k : report.ks) {
    rows.push_back({to_string(k.a), to_string(k.b), format_number(k.statistic),
                    format_number(k.critical),
                    k.statistic > k.critical ? "1" : "0"});
  }
  write_tsv(out_dir / "ks.tsv",
            {"scene_a", "scene_b", "ks_statistic", "critical_value", "exceeds"},
            rows);

  std::ofstream table(out_dir / "summary.txt");
  table << format_summary_table(report);
  table.close();

  if (!report.trigger_by_scene.empty()) {
    std::ofstream hist(out_dir / "trigger_histograms.svg");
    hist << render_histograms("Trigger step by scene type (dynamic, guided)",
                              report.trigger_by_scene, 16, 0,
                              static_cast<Scalar>(report.T));
  }
  if (report.trace_steps.size() >= 2) {
    std::ofstream lines(out_dir / "uniformity_trace.svg");
    lines << render_lines("Cost-weight uniformity, problem 0",
                          report.trace_steps, report.uniformity,
                          "denoising step t");
  }
}

}  // namespace socdiff
