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

#include "socdiff/io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "json.hpp"

namespace socdiff {

using nlohmann::json;

std::string format_number(Scalar x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

json write_vec(const Eigen::Ref<const Vec>& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec read_vec(const json& a) {
  if (!a.is_array()) throw IoError("io: expected a number array");
  Vec v(static_cast<Index>(a.size()));
  for (Index i = 0; i < v.size(); ++i)
    v[i] = a[static_cast<std::size_t>(i)].get<Scalar>();
  return v;
}

json write_aabb(const Aabb& b) {
  return json{{"min", {b.min.x(), b.min.y()}}, {"max", {b.max.x(), b.max.y()}}};
}

Aabb read_aabb(const json& j) {
  const Vec mn = read_vec(j.at("min")), mx = read_vec(j.at("max"));
  if (mn.size() != 2 || mx.size() != 2)
    throw IoError("io: box corners must have two coordinates");
  return Aabb{Vec2(mn[0], mn[1]), Vec2(mx[0], mx[1])};
}

json write_robot(const RobotModel& r) {
  json j;
  j["kind"] = r.kind == RobotKind::PointRobot ? "point" : "arm";
  j["link_lengths"] = r.link_lengths;
  j["link_half_width"] = r.link_half_width;
  j["config_min"] = write_vec(r.config_min);
  j["config_max"] = write_vec(r.config_max);
  return j;
}

RobotModel read_robot(const json& j) {
  RobotModel r;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "point")
    r.kind = RobotKind::PointRobot;
  else if (kind == "arm")
    r.kind = RobotKind::PlanarArm;
  else
    throw IoError("io: unknown robot kind: " + kind);
  r.link_lengths = j.at("link_lengths").get<std::vector<Scalar>>();
  r.link_half_width = j.at("link_half_width").get<Scalar>();
  r.config_min = read_vec(j.at("config_min"));
  r.config_max = read_vec(j.at("config_max"));
  validate(r);
  return r;
}

json write_scene_body(const Scene& s) {
  json j;
  j["scene_type"] = to_string(s.scene_type);
  j["bounds"] = write_aabb(s.bounds);
  json obs = json::array();
  for (const Aabb& o : s.obstacles) obs.push_back(write_aabb(o));
  j["obstacles"] = std::move(obs);
  return j;
}

Scene read_scene_body(const json& j) {
  Scene s;
  s.scene_type = scene_type_from_string(j.at("scene_type").get<std::string>());
  s.bounds = read_aabb(j.at("bounds"));
  for (const json& o : j.at("obstacles")) s.obstacles.push_back(read_aabb(o));
  return s;
}

json write_problem_body(const Problem& p) {
  json j;
  j["q_start"] = write_vec(p.q_start);
  j["q_goal"] = write_vec(p.q_goal);
  j["scene"] = write_scene_body(p.scene);
  return j;
}

Problem read_problem_body(const json& j) {
  Problem p;
  p.q_start = read_vec(j.at("q_start"));
  p.q_goal = read_vec(j.at("q_goal"));
  p.scene = read_scene_body(j.at("scene"));
  return p;
}

json write_matrix(const Mat& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Mat read_matrix(const json& j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  if (rows < 0 || cols < 0) throw IoError("io: negative matrix shape");
  const json& data = j.at("data");
  if (static_cast<Index>(data.size()) != rows)
    throw IoError("io: matrix row count does not match 'rows'");
  Mat m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = data[static_cast<std::size_t>(r)];
    if (static_cast<Index>(row.size()) != cols)
      throw IoError("io: matrix row length does not match 'cols'");
    for (Index c = 0; c < cols; ++c)
      m(r, c) = row[static_cast<std::size_t>(c)].get<Scalar>();
  }
  return m;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("io: cannot open for writing: " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw IoError("io: write failed: " + path.string());
}

json load_json_file(const std::filesystem::path& path,
                    const std::string& expected_format) {
  std::ifstream in(path);
  if (!in) throw IoError("io: cannot open: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("io: " + path.string() + ": " + e.what());
  }
  try {
    const std::string format = j.at("format").get<std::string>();
    if (format != expected_format)
      throw IoError("io: " + path.string() + ": expected format '" +
                    expected_format + "', found '" + format + "'");
    const int version = j.at("version").get<int>();
    if (version != kSchemaVersion)
      throw VersionError("io: " + path.string() + ": schema version " +
                         std::to_string(version) + " not supported (reader "
                         "understands version " +
                         std::to_string(kSchemaVersion) + ")");
  } catch (const json::exception& e) {
    throw IoError("io: " + path.string() + ": missing header field: " +
                  e.what());
  }
  return j;
}

json header(const char* format) {
  return json{{"format", format}, {"version", kSchemaVersion}};
}

// Field lookups below throw json::exception on missing/mistyped entries;
// funnel those into IoError with the file name attached.
template <typename Fn>
auto with_io_errors(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw IoError("io: " + path.string() + ": " + e.what());
  }
}

}  // namespace

void write_scene(const std::filesystem::path& path, const Scene& scene) {
  json j = header("socdiff.scene");
  j.update(write_scene_body(scene));
  write_json_file(path, j);
}

Scene read_scene(const std::filesystem::path& path) {
  const json j = load_json_file(path, "socdiff.scene");
  return with_io_errors(path, [&] { return read_scene_body(j); });
}

void write_problem(const std::filesystem::path& path, const Problem& problem) {
  json j = header("socdiff.problem");
  j.update(write_problem_body(problem));
  write_json_file(path, j);
}

Problem read_problem(const std::filesystem::path& path) {
  const json j = load_json_file(path, "socdiff.problem");
  return with_io_errors(path, [&] { return read_problem_body(j); });
}

void write_suite(const std::filesystem::path& path,
                 const BenchmarkSuite& suite) {
  json j = header("socdiff.suite");
  j["seed"] = suite.seed;
  j["per_type"] = suite.per_type;
  j["robot"] = write_robot(suite.robot);
  json problems = json::array();
  for (const Problem& p : suite.problems)
    problems.push_back(write_problem_body(p));
  j["problems"] = std::move(problems);
  json types = json::array();
  for (SceneType t : suite.problem_types) types.push_back(to_string(t));
  j["problem_types"] = std::move(types);
  write_json_file(path, j);
}

BenchmarkSuite read_suite(const std::filesystem::path& path) {
  const json j = load_json_file(path, "socdiff.suite");
  return with_io_errors(path, [&] {
    BenchmarkSuite s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.per_type = j.at("per_type").get<int>();
    s.robot = read_robot(j.at("robot"));
    for (const json& p : j.at("problems"))
      s.problems.push_back(read_problem_body(p));
    for (const json& t : j.at("problem_types"))
      s.problem_types.push_back(
          scene_type_from_string(t.get<std::string>()));
    if (s.problems.size() != s.problem_types.size())
      throw IoError("io: " + path.string() +
                    ": problems and problem_types length mismatch");
    return s;
  });
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  json j = header("socdiff.dataset");
  j["robot"] = write_robot(data.robot);
  json trajs = json::array();
  for (const Trajectory& tau : data.trajectories)
    trajs.push_back(write_matrix(tau));
  j["trajectories"] = std::move(trajs);
  write_json_file(path, j);
}

Dataset read_dataset(const std::filesystem::path& path) {
  const json j = load_json_file(path, "socdiff.dataset");
  return with_io_errors(path, [&] {
    Dataset d;
    d.robot = read_robot(j.at("robot"));
    for (const json& m : j.at("trajectories"))
      d.trajectories.push_back(read_matrix(m));
    return d;
  });
}

void write_trajectory(const std::filesystem::path& path,
                      const Trajectory& tau) {
  json j = header("socdiff.trajectory");
  j.update(write_matrix(tau));
  write_json_file(path, j);
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  const json j = load_json_file(path, "socdiff.trajectory");
  return with_io_errors(path, [&] { return read_matrix(j); });
}

void write_checkpoint(const std::filesystem::path& path,
                      const TemporalDenoiser& denoiser,
                      const RobotModel& robot, ScheduleKind schedule_kind,
                      int T) {
  json j = header("socdiff.checkpoint");
  j["denoiser"] = {
      {"kind", to_string(denoiser.spec().kind)},
      {"hidden_channels", denoiser.spec().hidden_channels},
      {"depth", denoiser.spec().depth},
      {"time_embed_dim", denoiser.spec().time_embed_dim},
  };
  j["waypoints"] = denoiser.waypoints();
  j["dims"] = denoiser.dims();
  j["schedule"] = {{"kind", to_string(schedule_kind)}, {"T", T}};
  j["robot"] = write_robot(robot);
  // Network parameters, flat row-major per tensor. Floats widen to double
  // exactly, so the JSON round trip is bit-preserving.
  json params;
  denoiser.net().visit_params(
      [&](const std::string& name, const Eigen::MatrixXf& p) {
        json flat = json::array();
        for (Eigen::Index r = 0; r < p.rows(); ++r)
          for (Eigen::Index c = 0; c < p.cols(); ++c)
            flat.push_back(static_cast<double>(p(r, c)));
        params[name] = {{"rows", p.rows()}, {"cols", p.cols()},
                        {"data", std::move(flat)}};
      });
  j["params"] = std::move(params);
  write_json_file(path, j);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  const json j = load_json_file(path, "socdiff.checkpoint");
  return with_io_errors(path, [&] {
    Checkpoint ck;
    const json& d = j.at("denoiser");
    ck.spec.kind = denoiser_kind_from_string(d.at("kind").get<std::string>());
    ck.spec.hidden_channels = d.at("hidden_channels").get<int>();
    ck.spec.depth = d.at("depth").get<int>();
    ck.spec.time_embed_dim = d.at("time_embed_dim").get<int>();
    const Index waypoints = j.at("waypoints").get<Index>();
    const Index dims = j.at("dims").get<Index>();
    ck.schedule_kind =
        schedule_kind_from_string(j.at("schedule").at("kind").get<std::string>());
    ck.schedule = make_schedule(j.at("schedule").at("T").get<int>(),
                                ck.schedule_kind);
    ck.robot = read_robot(j.at("robot"));
    if (dims != ck.robot.config_dim())
      throw IoError("io: " + path.string() +
                    ": checkpoint dims do not match its robot");
    ck.denoiser = std::make_unique<TemporalDenoiser>(ck.spec, waypoints, dims,
                                                     /*init_seed=*/0);
    const json& params = j.at("params");
    std::size_t used = 0;
    ck.denoiser->net().visit_params([&](const std::string& name,
                                        Eigen::MatrixXf& p) {
      const auto it = params.find(name);
      if (it == params.end())
        throw IoError("io: " + path.string() + ": missing parameter tensor '" +
                      name + "'");
      ++used;
      const json& entry = *it;
      if (entry.at("rows").get<Eigen::Index>() != p.rows() ||
          entry.at("cols").get<Eigen::Index>() != p.cols())
        throw IoError("io: " + path.string() + ": parameter tensor '" + name +
                      "' has the wrong shape");
      const json& flat = entry.at("data");
      if (static_cast<Eigen::Index>(flat.size()) != p.size())
        throw IoError("io: " + path.string() + ": parameter tensor '" + name +
                      "' has the wrong element count");
      std::size_t k = 0;
      for (Eigen::Index r = 0; r < p.rows(); ++r)
        for (Eigen::Index c = 0; c < p.cols(); ++c)
          p(r, c) = static_cast<float>(flat[k++].get<double>());
    });
    if (used != params.size())
      throw IoError("io: " + path.string() +
                    ": checkpoint carries unknown parameter tensors");
    return ck;
  });
}

void write_tsv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("io: cannot open for writing: " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? '\t' : '\n');
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw IoError("io: tsv row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? '\t' : '\n');
  }
  if (!out) throw IoError("io: write failed: " + path.string());
}

}  // namespace socdiff
