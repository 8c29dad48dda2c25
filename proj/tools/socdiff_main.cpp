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

// socdiff command-line tool: data generation, training, planning, the
// ablation benchmark, and plot emission. Exit codes: 0 success, 2 usage or
// config error, 3 planning/generation failure, 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "socdiff/bench.hpp"
#include "socdiff/denoiser.hpp"
#include "socdiff/diffusion.hpp"
#include "socdiff/io.hpp"
#include "socdiff/planner.hpp"
#include "socdiff/rng.hpp"
#include "socdiff/svg.hpp"
#include "socdiff/world.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace socdiff;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kPlanFail = 3;
constexpr int kIo = 4;

// Every tunable reachable from a config file or a flag. Sentinels (-1)
// mark optional fields left unset.
struct Flags {
  // Global.
  std::string config_path;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_dir = ".";
  // Planner / guidance.
  int K = 64;
  int T = 128;
  std::string schedule = "linear";
  Scalar guidance_scale = 0.1;
  Scalar lambda = 0.1;
  Scalar gamma = 0.9;
  Scalar epsilon = -1;
  int warmup_steps = 5;
  int fallback_floor_step = -1;
  int fixed_start_step = -1;
  std::string guidance_target = "tau0";
  bool skip_unused_cost_eval = false;
  // Robot (gen-data, plot).
  std::string robot = "point";
  std::string links = "0.5,0.35";
  // gen-data.
  int per_type = 50;
  int train_n = 512;
  int waypoints = 50;
  Scalar separation = 0.5;
  std::string suite_out;
  std::string train_out;
  // train.
  std::string data_path;
  std::string checkpoint_out;
  std::string loss_out;
  int hidden = 64;
  int depth = 4;
  int time_embed = 32;
  int steps = 3000;
  int batch = 256;
  Scalar lr = 1e-3;
  // plan / bench.
  std::string checkpoint_path;
  std::string problem_path;
  std::string suite_path;
  std::string traj_out;
  std::string svg_out;
  std::string trace_out;
  // plot.
  std::string scene_path;
  std::vector<std::string> traj_paths;
  std::string plot_out;
};

// Keys a config file may set; everything else is a typo worth rejecting.
void apply_config(const json& j, Flags& f) {
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") f.seed = value.get<std::uint64_t>();
    else if (key == "workers") f.workers = value.get<int>();
    else if (key == "out_dir") f.out_dir = value.get<std::string>();
    else if (key == "K") f.K = value.get<int>();
    else if (key == "T") f.T = value.get<int>();
    else if (key == "schedule") f.schedule = value.get<std::string>();
    else if (key == "guidance_scale") f.guidance_scale = value.get<Scalar>();
    else if (key == "lambda") f.lambda = value.get<Scalar>();
    else if (key == "gamma") f.gamma = value.get<Scalar>();
    else if (key == "epsilon") f.epsilon = value.get<Scalar>();
    else if (key == "warmup_steps") f.warmup_steps = value.get<int>();
    else if (key == "fallback_floor_step")
      f.fallback_floor_step = value.get<int>();
    else if (key == "fixed_start_step") f.fixed_start_step = value.get<int>();
    else if (key == "guidance_target")
      f.guidance_target = value.get<std::string>();
    else if (key == "skip_unused_cost_eval")
      f.skip_unused_cost_eval = value.get<bool>();
    else if (key == "robot") f.robot = value.get<std::string>();
    else if (key == "links") f.links = value.get<std::string>();
    else if (key == "per_type") f.per_type = value.get<int>();
    else if (key == "train_n") f.train_n = value.get<int>();
    else if (key == "waypoints") f.waypoints = value.get<int>();
    else if (key == "separation") f.separation = value.get<Scalar>();
    else if (key == "hidden") f.hidden = value.get<int>();
    else if (key == "depth") f.depth = value.get<int>();
    else if (key == "time_embed") f.time_embed = value.get<int>();
    else if (key == "steps") f.steps = value.get<int>();
    else if (key == "batch") f.batch = value.get<int>();
    else if (key == "lr") f.lr = value.get<Scalar>();
    else
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

PlannerConfig planner_config(const Flags& f) {
  PlannerConfig cfg;
  cfg.K = f.K;
  cfg.T = f.T;
  cfg.schedule_kind = schedule_kind_from_string(f.schedule);
  cfg.guidance.w = f.guidance_scale;
  cfg.guidance.lambda = f.lambda;
  cfg.guidance.gamma = f.gamma;
  if (f.epsilon >= 0) cfg.guidance.epsilon = f.epsilon;
  cfg.guidance.warmup_steps = f.warmup_steps;
  if (f.fallback_floor_step >= 0)
    cfg.guidance.fallback_floor_step = f.fallback_floor_step;
  if (f.fixed_start_step >= 0) cfg.fixed_start_step = f.fixed_start_step;
  cfg.guidance_target = guidance_target_from_string(f.guidance_target);
  cfg.seed = f.seed;
  cfg.workers = f.workers;
  cfg.skip_unused_cost_eval = f.skip_unused_cost_eval;
  validate(cfg);
  return cfg;
}

RobotModel make_robot(const Flags& f) {
  if (f.robot == "point") return RobotModel::point();
  if (f.robot == "arm") {
    std::vector<Scalar> lengths;
    std::stringstream ss(f.links);
    std::string item;
    while (std::getline(ss, item, ','))
      lengths.push_back(std::stod(item));
    return RobotModel::arm(std::move(lengths));
  }
  throw std::invalid_argument("robot must be 'point' or 'arm', got '" +
                              f.robot + "'");
}

// Planner flags shared by plan and bench.
void add_planner_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--K", f.K, "parallel denoising chains");
  cmd->add_option("--T", f.T,
                  "diffusion steps (default: the checkpoint's schedule)");
  cmd->add_option("--schedule", f.schedule, "noise schedule: linear|cosine");
  cmd->add_option("--guidance-scale", f.guidance_scale,
                  "guidance weight w on the cost gradient; 0 disables");
  cmd->add_option("--lambda", f.lambda, "softmax temperature over costs");
  cmd->add_option("--gamma", f.gamma, "EMA coefficient for uniformity");
  cmd->add_option("--epsilon", f.epsilon,
                  "trigger threshold on |EMA change| (default 0.002*K)");
  cmd->add_option("--warmup-steps", f.warmup_steps,
                  "steps before the trigger may fire");
  cmd->add_option("--fallback-floor-step", f.fallback_floor_step,
                  "activate guidance at this step if the trigger never "
                  "fires (default T/8)");
  cmd->add_option("--fixed-start-step", f.fixed_start_step,
                  "bypass the trigger, activate at exactly this step");
  cmd->add_option("--guidance-target", f.guidance_target,
                  "gradient evaluation point: tau0|tau_t");
  cmd->add_flag("--skip-unused-cost-eval", f.skip_unused_cost_eval,
                "skip cost evaluation once active with w=0");
}

int cmd_gen_data(const Flags& f) {
  if (f.suite_out.empty() && f.train_out.empty())
    throw std::invalid_argument(
        "gen-data: need --suite-out and/or --train-out");
  if (!f.suite_out.empty() && f.per_type < 1)
    throw std::invalid_argument("gen-data: --per-type must be >= 1");
  if (!f.train_out.empty() && f.train_n < 1)
    throw std::invalid_argument("gen-data: --train-n must be >= 1");
  if (f.waypoints < 4)
    throw std::invalid_argument("gen-data: --waypoints must be >= 4");
  const RobotModel robot = make_robot(f);

  if (!f.suite_out.empty()) {
    ProblemGenOptions opts;
    opts.separation_fraction = f.separation;
    const BenchmarkSuite suite =
        generate_suite(robot, f.per_type, f.seed, opts);
    write_suite(f.suite_out, suite);
    std::printf("suite: %zu problems (4 types x %d), seed=%llu -> %s\n",
                suite.problems.size(), f.per_type,
                static_cast<unsigned long long>(f.seed), f.suite_out.c_str());
  }
  if (!f.train_out.empty()) {
    Rng rng(derive_seed(f.seed, 1));
    Dataset data;
    data.robot = robot;
    data.trajectories =
        generate_training_set(robot, f.train_n, f.waypoints, rng);
    write_dataset(f.train_out, data);
    std::printf("training set: %d trajectories x %d waypoints, seed=%llu "
                "-> %s\n",
                f.train_n, f.waypoints,
                static_cast<unsigned long long>(f.seed), f.train_out.c_str());
  }
  return kOk;
}

int cmd_train(const Flags& f) {
  if (f.data_path.empty() || f.checkpoint_out.empty())
    throw std::invalid_argument("train: need --data and --checkpoint");
  const Dataset data = read_dataset(f.data_path);
  if (data.trajectories.empty())
    throw std::invalid_argument("train: dataset is empty");
  const Index L = data.trajectories.front().rows();
  const Index D = data.trajectories.front().cols();
  for (const Trajectory& tau : data.trajectories)
    if (tau.rows() != L || tau.cols() != D)
      throw std::invalid_argument("train: ragged dataset");
  if (D != data.robot.config_dim())
    throw std::invalid_argument("train: dataset dims != robot config dims");

  DenoiserSpec spec;
  spec.hidden_channels = f.hidden;
  spec.depth = f.depth;
  spec.time_embed_dim = f.time_embed;
  TemporalDenoiser model(spec, L, D, derive_seed(f.seed, 0));
  const ScheduleKind kind = schedule_kind_from_string(f.schedule);
  const NoiseSchedule schedule = make_schedule(f.T, kind);
  TrainConfig tc;
  tc.steps = f.steps;
  tc.batch_size = f.batch;
  tc.learning_rate = f.lr;
  tc.seed = derive_seed(f.seed, 1);
  validate(tc);

  const std::vector<Scalar> loss = train(model, data.trajectories, schedule, tc);
  write_checkpoint(f.checkpoint_out, model, data.robot, kind, f.T);
  if (!f.loss_out.empty()) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(loss.size());
    for (std::size_t i = 0; i < loss.size(); ++i)
      rows.push_back({std::to_string(i), format_number(loss[i])});
    write_tsv(f.loss_out, {"step", "loss"}, rows);
  }
  const std::size_t tail = std::min<std::size_t>(50, loss.size());
  Scalar smoothed = 0;
  for (std::size_t i = loss.size() - tail; i < loss.size(); ++i)
    smoothed += loss[i];
  smoothed /= static_cast<Scalar>(tail);
  std::printf("trained %d steps (H=%d depth=%d), final loss (last-%zu "
              "mean) %.4f -> %s\n",
              f.steps, f.hidden, f.depth, tail, smoothed,
              f.checkpoint_out.c_str());
  return kOk;
}

void write_trace_tsv(const fs::path& path,
                     const std::vector<StepTrace>& trace) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(trace.size());
  for (const StepTrace& s : trace) {
    rows.push_back({std::to_string(s.t), format_number(s.cost_min),
                    format_number(s.cost_mean), format_number(s.cost_max),
                    format_number(s.U), format_number(s.U_smooth),
                    format_number(s.grad_U), s.active ? "1" : "0"});
  }
  write_tsv(path,
            {"t", "cost_min", "cost_mean", "cost_max", "U", "U_smooth",
             "grad_U", "active"},
            rows);
}

int cmd_plan(const Flags& f, bool T_given, bool schedule_given) {
  if (f.checkpoint_path.empty() || f.problem_path.empty())
    throw std::invalid_argument("plan: need --checkpoint and --problem");
  const Checkpoint ckpt = read_checkpoint(f.checkpoint_path);
  const Problem problem = read_problem(f.problem_path);
  if (problem.q_start.size() != ckpt.robot.config_dim())
    throw std::invalid_argument(
        "plan: problem dimension does not match the checkpoint robot");

  Flags g = f;
  if (!T_given) g.T = ckpt.schedule.T;
  if (!schedule_given) g.schedule = to_string(ckpt.schedule_kind);
  const PlannerConfig cfg = planner_config(g);

  const PlanResult res = plan(problem, ckpt.robot, *ckpt.denoiser, cfg);
  if (!f.traj_out.empty()) write_trajectory(f.traj_out, res.best);
  if (!f.svg_out.empty()) {
    std::ofstream out(f.svg_out);
    if (!out) throw IoError("plan: cannot write " + f.svg_out);
    out << render_scene(problem.scene, ckpt.robot, &problem, {res.best});
  }
  if (!f.trace_out.empty()) write_trace_tsv(f.trace_out, res.trace);

  std::printf("%s: best cost %.6g, trigger step %s%s%s\n",
              res.success ? "success" : "no valid trajectory", res.best_cost,
              res.trigger_step ? std::to_string(*res.trigger_step).c_str()
                               : "none",
              f.traj_out.empty() ? "" : " -> ",
              f.traj_out.empty() ? "" : f.traj_out.c_str());
  return res.success ? kOk : kPlanFail;
}

int cmd_bench(const Flags& f, bool T_given, bool schedule_given) {
  if (f.checkpoint_path.empty() || f.suite_path.empty())
    throw std::invalid_argument("bench: need --checkpoint and --suite");
  const Checkpoint ckpt = read_checkpoint(f.checkpoint_path);
  const BenchmarkSuite suite = read_suite(f.suite_path);
  if (suite.robot.config_dim() != ckpt.robot.config_dim())
    throw std::invalid_argument(
        "bench: suite robot does not match the checkpoint robot");

  Flags g = f;
  if (!T_given) g.T = ckpt.schedule.T;
  if (!schedule_given) g.schedule = to_string(ckpt.schedule_kind);
  const PlannerConfig base = planner_config(g);

  const BenchReport report = run_bench(suite, *ckpt.denoiser, base, f.workers);
  write_bench_artifacts(f.out_dir, report);
  std::printf("%s", format_summary_table(report).c_str());
  for (const ScenePairKs& k : report.ks)
    std::printf("KS %s vs %s: %.4f (critical %.4f)%s\n", to_string(k.a),
                to_string(k.b), k.statistic, k.critical,
                k.statistic > k.critical ? " *" : "");
  std::printf("bench: %zu problems x %zu cells in %.1fs -> %s\n",
              suite.problems.size(), report.cells.size(), report.seconds,
              f.out_dir.c_str());
  return kOk;
}

int cmd_plot(const Flags& f) {
  if (f.plot_out.empty())
    throw std::invalid_argument("plot: need --out");
  if (f.problem_path.empty() == f.scene_path.empty())
    throw std::invalid_argument(
        "plot: need exactly one of --problem or --scene");
  const RobotModel robot = make_robot(f);
  std::optional<Problem> problem;
  Scene scene;
  if (!f.problem_path.empty()) {
    problem = read_problem(f.problem_path);
    if (problem->q_start.size() != robot.config_dim())
      throw std::invalid_argument(
          "plot: problem dimension does not match --robot");
    scene = problem->scene;
  } else {
    scene = read_scene(f.scene_path);
  }
  std::vector<Trajectory> trajs;
  for (const std::string& p : f.traj_paths)
    trajs.push_back(read_trajectory(p));

  std::ofstream out(f.plot_out);
  if (!out) throw IoError("plot: cannot write " + f.plot_out);
  out << render_scene(scene, robot, problem ? &*problem : nullptr, trajs);
  std::printf("plot: %zu obstacles, %zu trajectories -> %s\n",
              scene.obstacles.size(), trajs.size(), f.plot_out.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Flags f;

  // The config file seeds the defaults; explicit flags override it, so it
  // has to be found and applied before CLI11 parses the rest.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc)
      f.config_path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      f.config_path = arg.substr(9);
  }
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) {
      std::cerr << "error: cannot open config: " << f.config_path << "\n";
      return kIo;
    }
    try {
      apply_config(json::parse(in), f);
    } catch (const json::parse_error& e) {
      std::cerr << "error: config " << f.config_path << ": " << e.what()
                << "\n";
      return kIo;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kUsage;
    }
  }

  CLI::App app{"sum-of-costs diffusion planner"};
  app.require_subcommand(0, 1);
  std::string config_sink;
  app.add_option("--config", config_sink,
                 "JSON config file; flags override its values")
      ->configurable(false);
  app.add_option("--seed", f.seed, "master seed");
  app.add_option("--workers", f.workers, "worker threads");
  app.add_option("--out-dir", f.out_dir, "output directory");

  auto add_global = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_sink, "JSON config file");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--workers", f.workers, "worker threads");
    cmd->add_option("--out-dir", f.out_dir, "output directory");
  };

  CLI::App* gen = app.add_subcommand("gen-data",
                                     "generate a benchmark suite and/or a "
                                     "spline training set");
  add_global(gen);
  gen->add_option("--robot", f.robot, "point|arm");
  gen->add_option("--links", f.links, "arm link lengths, comma separated");
  gen->add_option("--per-type", f.per_type, "problems per scene type");
  gen->add_option("--train-n", f.train_n, "training trajectories");
  gen->add_option("--waypoints", f.waypoints, "waypoints per trajectory");
  gen->add_option("--separation", f.separation,
                  "min start-goal separation as a workspace fraction");
  gen->add_option("--suite-out", f.suite_out, "benchmark suite output file");
  gen->add_option("--train-out", f.train_out, "training set output file");

  CLI::App* tr = app.add_subcommand("train", "train the temporal denoiser");
  add_global(tr);
  tr->add_option("--data", f.data_path, "training set file")->required();
  tr->add_option("--checkpoint", f.checkpoint_out, "checkpoint output file")
      ->required();
  tr->add_option("--loss-out", f.loss_out, "per-step loss TSV");
  tr->add_option("--hidden", f.hidden, "hidden channels");
  tr->add_option("--depth", f.depth, "conv blocks");
  tr->add_option("--time-embed", f.time_embed, "timestep embedding dims");
  tr->add_option("--steps", f.steps, "optimizer steps");
  tr->add_option("--batch", f.batch, "batch size");
  tr->add_option("--lr", f.lr, "learning rate");
  tr->add_option("--T", f.T, "diffusion steps for the schedule");
  tr->add_option("--schedule", f.schedule, "linear|cosine");

  CLI::App* pl = app.add_subcommand("plan", "plan one problem");
  add_global(pl);
  pl->add_option("--checkpoint", f.checkpoint_path, "trained checkpoint")
      ->required();
  pl->add_option("--problem", f.problem_path, "problem file")->required();
  pl->add_option("--out", f.traj_out, "trajectory output file");
  pl->add_option("--svg", f.svg_out, "scene + trajectory SVG");
  pl->add_option("--trace", f.trace_out, "per-step trace TSV");
  add_planner_flags(pl, f);

  CLI::App* be = app.add_subcommand("bench",
                                    "run the guidance ablation matrix over "
                                    "a suite");
  add_global(be);
  be->add_option("--checkpoint", f.checkpoint_path, "trained checkpoint")
      ->required();
  be->add_option("--suite", f.suite_path, "benchmark suite file")->required();
  add_planner_flags(be, f);

  CLI::App* po = app.add_subcommand("plot",
                                    "render a scene or problem with "
                                    "optional trajectories to SVG");
  add_global(po);
  po->add_option("--problem", f.problem_path, "problem file");
  po->add_option("--scene", f.scene_path, "scene file");
  po->add_option("--trajectory", f.traj_paths, "trajectory file (repeatable)");
  po->add_option("--robot", f.robot, "point|arm");
  po->add_option("--links", f.links, "arm link lengths, comma separated");
  po->add_option("--out", f.plot_out, "SVG output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(f);
    if (tr->parsed()) return cmd_train(f);
    if (pl->parsed())
      return cmd_plan(f, pl->count("--T") > 0, pl->count("--schedule") > 0);
    if (be->parsed())
      return cmd_bench(f, be->count("--T") > 0, be->count("--schedule") > 0);
    if (po->parsed()) return cmd_plot(f);
    std::cout << app.help();
    return kUsage;
  } catch (const GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPlanFail;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
