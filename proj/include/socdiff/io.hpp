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

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "socdiff/denoiser.hpp"
#include "socdiff/diffusion.hpp"
#include "socdiff/world.hpp"

namespace socdiff {

/// File cannot be opened, parsed, or fails schema validation. Parse
/// failures carry the position reported by the JSON parser.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File carries a schema version this reader does not understand.
struct VersionError : IoError {
  using IoError::IoError;
};

/// Schema version stamped into every file this library writes.
inline constexpr int kSchemaVersion = 1;

/// Shortest decimal string that parses back to exactly the same double.
std::string format_number(Scalar x);

void write_scene(const std::filesystem::path& path, const Scene& scene);
Scene read_scene(const std::filesystem::path& path);

void write_problem(const std::filesystem::path& path, const Problem& problem);
Problem read_problem(const std::filesystem::path& path);

void write_suite(const std::filesystem::path& path,
                 const BenchmarkSuite& suite);
BenchmarkSuite read_suite(const std::filesystem::path& path);

/// Training set: normalized trajectories plus the robot they were drawn
/// for, so downstream tools can validate dimensions and embed the robot
/// in checkpoints.
struct Dataset {
  RobotModel robot;
  std::vector<Trajectory> trajectories;
};
void write_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& path);

void write_trajectory(const std::filesystem::path& path,
                      const Trajectory& tau);
Trajectory read_trajectory(const std::filesystem::path& path);

/// Everything needed to run the planner again: network weights plus the
/// trajectory shape, noise schedule, and normalization bounds they were
/// trained against.
struct Checkpoint {
  DenoiserSpec spec;
  ScheduleKind schedule_kind = ScheduleKind::Linear;
  NoiseSchedule schedule;
  RobotModel robot;
  std::unique_ptr<TemporalDenoiser> denoiser;
};

void write_checkpoint(const std::filesystem::path& path,
                      const TemporalDenoiser& denoiser,
                      const RobotModel& robot, ScheduleKind schedule_kind,
                      int T);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Tab-separated table with a header row. Callers format numeric cells
/// with format_number so tables round-trip exactly.
void write_tsv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace socdiff
