// Copyright 2026 The LMBAO Authors
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
#include "lmbao/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace lmbao {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument("expected a number");
  return out;
}

long to_long(const std::string& v) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw std::invalid_argument("expected an integer");
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw std::invalid_argument("expected a boolean");
}

std::vector<double> to_list(const std::string& v, size_t n) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(tok));
  if (out.size() != n) throw std::invalid_argument("expected " + std::to_string(n) + " numbers");
  return out;
}

Vec3 to_vec3(const std::string& v) {
  const auto l = to_list(v, 3);
  return Vec3(l[0], l[1], l[2]);
}

template <typename Cfg>
using Setter = std::function<void(Cfg&, const std::string&)>;

template <typename Cfg>
void apply(Cfg& cfg, const std::map<std::string, Setter<Cfg>>& table,
           const std::vector<KeyValue>& pairs, const std::string& source) {
  for (const auto& kv : pairs) {
    auto it = table.find(kv.key);
    if (it == table.end()) throw ConfigError(source, kv.line, "unknown key '" + kv.key + "'");
    try {
      it->second(cfg, kv.value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, kv.line, "bad value for '" + kv.key + "': " + e.what());
    }
  }
}

const std::map<std::string, Setter<OdometryConfig>>& odometry_table() {
  using C = OdometryConfig;
  static const std::map<std::string, Setter<C>> table = {
      {"alpha", [](C& c, const std::string& v) { c.features.projection.alpha = to_double(v); }},
      {"columns", [](C& c, const std::string& v) { c.features.projection.columns = static_cast<int>(to_long(v)); }},
      {"rings", [](C& c, const std::string& v) { c.features.projection.rings = static_cast<int>(to_long(v)); }},
      {"elev_min_deg", [](C& c, const std::string& v) { c.features.projection.elev_min_deg = to_double(v); }},
      {"elev_max_deg", [](C& c, const std::string& v) { c.features.projection.elev_max_deg = to_double(v); }},
      {"plane_threshold", [](C& c, const std::string& v) { c.features.classify.plane_threshold = to_double(v); }},
      {"edge_threshold", [](C& c, const std::string& v) { c.features.classify.edge_threshold = to_double(v); }},
      {"smooth_window", [](C& c, const std::string& v) { c.features.classify.window = static_cast<int>(to_long(v)); }},
      {"depth_gap", [](C& c, const std::string& v) { c.features.classify.depth_gap = to_double(v); }},
      {"min_cluster", [](C& c, const std::string& v) { c.features.classify.min_cluster = static_cast<int>(to_long(v)); }},
      {"edge_peak_only", [](C& c, const std::string& v) { c.features.classify.edge_peak_only = to_bool(v); }},
      {"plane_voxel", [](C& c, const std::string& v) { c.features.plane_voxel = to_double(v); }},
      {"edge_voxel", [](C& c, const std::string& v) { c.features.edge_voxel = to_double(v); }},
      {"obs_count_init", [](C& c, const std::string& v) { c.landmarks.obs_count_init = static_cast<int>(to_long(v)); }},
      {"drift_factor", [](C& c, const std::string& v) { c.landmarks.drift_factor = to_double(v); }},
      {"min_plane_points", [](C& c, const std::string& v) { c.landmarks.min_plane_points = to_long(v); }},
      {"min_plane_age", [](C& c, const std::string& v) { c.landmarks.min_plane_age = static_cast<int>(to_long(v)); }},
      {"radius_clamp",
       [](C& c, const std::string& v) {
         const auto l = to_list(v, 2);
         c.landmarks.radius_min = l[0];
         c.landmarks.radius_max = l[1];
       }},
      {"plane_gate", [](C& c, const std::string& v) { c.landmarks.plane_gate = to_double(v); }},
      {"normal_gate_cos", [](C& c, const std::string& v) { c.landmarks.normal_gate_cos = to_double(v); }},
      {"edge_gate", [](C& c, const std::string& v) { c.landmarks.edge_gate = to_double(v); }},
      {"spawn_cell", [](C& c, const std::string& v) { c.landmarks.spawn_cell = to_double(v); }},
      {"min_spawn_points", [](C& c, const std::string& v) { c.landmarks.min_spawn_points = static_cast<int>(to_long(v)); }},
      {"plane_fit_max", [](C& c, const std::string& v) { c.landmarks.plane_fit_max = to_double(v); }},
      {"edge_fit_max", [](C& c, const std::string& v) { c.landmarks.edge_fit_max = to_double(v); }},
      {"window_size", [](C& c, const std::string& v) { c.window_size = static_cast<int>(to_long(v)); }},
      {"lm_max_iters", [](C& c, const std::string& v) { c.lm.max_iters = static_cast<int>(to_long(v)); }},
      {"lm_init_damping", [](C& c, const std::string& v) { c.lm.init_damping = to_double(v); }},
      {"lm_relative_tolerance", [](C& c, const std::string& v) { c.lm.relative_tolerance = to_double(v); }},
      {"lm_step_tolerance", [](C& c, const std::string& v) { c.lm.step_tolerance = to_double(v); }},
      {"weights.position", [](C& c, const std::string& v) { c.lm.weights.position = to_double(v); }},
      {"weights.rotation", [](C& c, const std::string& v) { c.lm.weights.rotation = to_double(v); }},
      {"weights.angular", [](C& c, const std::string& v) { c.lm.weights.angular = to_double(v); }},
      {"sqrt_n_weighting", [](C& c, const std::string& v) { c.lm.sqrt_n_weighting = to_bool(v); }},
      {"min_plane_eval", [](C& c, const std::string& v) { c.lm.min_plane_eval = to_long(v); }},
      {"min_edge_eval", [](C& c, const std::string& v) { c.lm.min_edge_eval = to_long(v); }},
      {"parallel", [](C& c, const std::string& v) { c.lm.parallel = to_bool(v); }},
      {"report_timing", [](C& c, const std::string& v) { c.report_timing = to_bool(v); }},
  };
  return table;
}

const std::map<std::string, Setter<SynthConfig>>& synth_table() {
  using C = SynthConfig;
  static const std::map<std::string, Setter<C>> table = {
      {"layout",
       [](C& c, const std::string& v) {
         if (v == "random") {
           c.world.layout = WorldLayout::Random;
         } else if (v == "corridor") {
           c.world.layout = WorldLayout::Corridor;
         } else if (v == "loop") {
           c.world.layout = WorldLayout::Loop;
         } else {
           throw std::invalid_argument("expected random, corridor or loop");
         }
       }},
      {"seed", [](C& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_long(v)); }},
      {"num_planes", [](C& c, const std::string& v) { c.world.num_planes = static_cast<int>(to_long(v)); }},
      {"num_edges", [](C& c, const std::string& v) { c.world.num_edges = static_cast<int>(to_long(v)); }},
      {"bounds_min", [](C& c, const std::string& v) { c.world.bounds_min = to_vec3(v); }},
      {"bounds_max", [](C& c, const std::string& v) { c.world.bounds_max = to_vec3(v); }},
      {"min_half_extent", [](C& c, const std::string& v) { c.world.min_half_extent = to_double(v); }},
      {"max_half_extent", [](C& c, const std::string& v) { c.world.max_half_extent = to_double(v); }},
      {"corridor_start", [](C& c, const std::string& v) { c.world.corridor_start = to_double(v); }},
      {"corridor_end", [](C& c, const std::string& v) { c.world.corridor_end = to_double(v); }},
      {"corridor_half_width", [](C& c, const std::string& v) { c.world.corridor_half_width = to_double(v); }},
      {"floor_z", [](C& c, const std::string& v) { c.world.floor_z = to_double(v); }},
      {"ceiling_z", [](C& c, const std::string& v) { c.world.ceiling_z = to_double(v); }},
      {"loop_side", [](C& c, const std::string& v) { c.world.loop_side = to_double(v); }},
      {"loop_corner_radius", [](C& c, const std::string& v) { c.world.loop_corner_radius = to_double(v); }},
      {"loop_wall_top", [](C& c, const std::string& v) { c.world.loop_wall_top = to_double(v); }},
      {"columns", [](C& c, const std::string& v) { c.beam.columns = static_cast<int>(to_long(v)); }},
      {"rings", [](C& c, const std::string& v) { c.beam.rings = static_cast<int>(to_long(v)); }},
      {"elev_min_deg", [](C& c, const std::string& v) { c.beam.elev_min_deg = to_double(v); }},
      {"elev_max_deg", [](C& c, const std::string& v) { c.beam.elev_max_deg = to_double(v); }},
      {"min_range", [](C& c, const std::string& v) { c.beam.min_range = to_double(v); }},
      {"max_range", [](C& c, const std::string& v) { c.beam.max_range = to_double(v); }},
      {"noise_sigma", [](C& c, const std::string& v) { c.beam.noise_sigma = to_double(v); }},
      {"edge_aperture", [](C& c, const std::string& v) { c.beam.edge_aperture = to_double(v); }},
      {"num_scans", [](C& c, const std::string& v) { c.num_scans = static_cast<int>(to_long(v)); }},
      {"scan_period", [](C& c, const std::string& v) { c.scan_period = to_double(v); }},
      {"linear_velocity", [](C& c, const std::string& v) { c.linear_velocity = to_vec3(v); }},
      {"angular_velocity", [](C& c, const std::string& v) { c.angular_velocity = to_vec3(v); }},
      {"loop_speed", [](C& c, const std::string& v) { c.loop_speed = to_double(v); }},
      {"sensor_height", [](C& c, const std::string& v) { c.sensor_height = to_double(v); }},
  };
  return table;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source) {
  std::vector<KeyValue> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected key = value");
    KeyValue kv{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line};
    if (kv.key.empty()) throw ConfigError(source, line, "empty key");
    if (kv.value.empty()) throw ConfigError(source, line, "empty value for '" + kv.key + "'");
    out.push_back(std::move(kv));
  }
  return out;
}

std::vector<KeyValue> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  return parse_key_values(in, path.string());
}

void validate(const OdometryConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid configuration: ") + what);
  };
  require(c.window_size >= 2, "window_size must be at least 2");
  require(c.features.projection.alpha > 0.0, "alpha must be positive");
  require(c.features.projection.columns > 0 && c.features.projection.rings > 0, "image size must be positive");
  require(c.features.projection.elev_max_deg > c.features.projection.elev_min_deg, "elevation range is empty");
  require(c.features.classify.plane_threshold > 0.0, "plane_threshold must be positive");
  require(c.features.classify.edge_threshold > c.features.classify.plane_threshold,
          "edge_threshold must exceed plane_threshold");
  require(c.features.classify.window >= 1, "smooth_window must be at least 1");
  require(c.features.classify.depth_gap > 0.0, "depth_gap must be positive");
  require(c.features.classify.min_cluster >= 1, "min_cluster must be at least 1");
  require(c.landmarks.obs_count_init >= 1, "obs_count_init must be at least 1");
  require(c.landmarks.drift_factor > 0.0, "drift_factor must be positive");
  require(c.landmarks.radius_min > 0.0 && c.landmarks.radius_max >= c.landmarks.radius_min,
          "radius_clamp must satisfy 0 < min <= max");
  require(c.landmarks.spawn_cell > 0.0, "spawn_cell must be positive");
  require(c.lm.max_iters >= 1, "lm_max_iters must be at least 1");
  require(c.lm.init_damping > 0.0, "lm_init_damping must be positive");
  require(c.lm.step_tolerance >= 0.0, "lm_step_tolerance must be non-negative");
  require(c.lm.weights.position >= 0.0 && c.lm.weights.rotation >= 0.0 && c.lm.weights.angular >= 0.0,
          "weights must be non-negative");
}

OdometryConfig parse_odometry_config(const std::vector<KeyValue>& pairs, const std::string& source) {
  OdometryConfig cfg;
  apply(cfg, odometry_table(), pairs, source);
  validate(cfg);
  return cfg;
}

OdometryConfig load_odometry_config(const std::filesystem::path& path) {
  return parse_odometry_config(read_key_value_file(path), path.string());
}

std::vector<std::string> odometry_config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : odometry_table()) keys.push_back(k);
  return keys;
}

TrajectoryKind parse_trajectory_kind(const std::string& name) {
  if (name == "stationary") return TrajectoryKind::Stationary;
  if (name == "constant_twist" || name == "straight") return TrajectoryKind::ConstantTwist;
  if (name == "square_loop" || name == "loop") return TrajectoryKind::SquareLoop;
  throw std::invalid_argument("unknown trajectory kind '" + name +
                              "' (expected stationary, constant_twist or square_loop)");
}

SynthConfig parse_synth_config(const std::vector<KeyValue>& pairs, const std::string& source) {
  SynthConfig cfg;
  apply(cfg, synth_table(), pairs, source);
  if (cfg.num_scans < 1) throw ConfigError(source, 0, "num_scans must be at least 1");
  if (!(cfg.scan_period > 0.0)) throw ConfigError(source, 0, "scan_period must be positive");
  return cfg;
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
  return parse_synth_config(read_key_value_file(path), path.string());
}

Trajectory make_trajectory(const SynthConfig& config, TrajectoryKind kind) {
  RigidTransform start;
  start.translation = Vec3(0.0, 0.0, config.sensor_height);
  switch (kind) {
    case TrajectoryKind::Stationary:
      return Trajectory::stationary(start);
    case TrajectoryKind::ConstantTwist:
      return Trajectory::constant_twist(start, config.linear_velocity, config.angular_velocity);
    case TrajectoryKind::SquareLoop:
      return Trajectory::square_loop(config.world.loop_side, config.world.loop_corner_radius,
                                     config.loop_speed, config.sensor_height);
  }
  throw std::invalid_argument("make_trajectory: unknown kind");
}

}  // namespace lmbao
