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
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmbao/feature_extract.hpp"
#include "lmbao/landmark_map.hpp"
#include "lmbao/optimizer.hpp"
#include "lmbao/synthetic.hpp"

namespace lmbao {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Plain `key = value` lines; `#` starts a comment; blank lines ignored.
std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source);
std::vector<KeyValue> read_key_value_file(const std::filesystem::path& path);

struct OdometryConfig {
  FeatureParams features;
  LandmarkParams landmarks;
  LmConfig lm;
  int window_size = 4;
  // When false the report's time_ms column is written as 0 so that repeated
  // runs produce byte-identical reports.
  bool report_timing = true;
};

/// Applies the pairs over defaults. Unknown keys and malformed values throw
/// ConfigError; the result is validated.
OdometryConfig parse_odometry_config(const std::vector<KeyValue>& pairs,
                                     const std::string& source = "<config>");
OdometryConfig load_odometry_config(const std::filesystem::path& path);
/// Throws std::invalid_argument on out-of-range values.
void validate(const OdometryConfig& config);
/// Every accepted odometry key, sorted.
std::vector<std::string> odometry_config_keys();

enum class TrajectoryKind { Stationary, ConstantTwist, SquareLoop };
TrajectoryKind parse_trajectory_kind(const std::string& name);

struct SynthConfig {
  WorldConfig world;
  std::uint64_t seed = 1;
  BeamModel beam;
  int num_scans = 100;
  double scan_period = 0.1;
  Vec3 linear_velocity = Vec3(1.5, 0.0, 0.0);  // constant_twist, body frame
  Vec3 angular_velocity = Vec3::Zero();
  double loop_speed = 2.0;  // square_loop
  double sensor_height = 0.0;
};

SynthConfig parse_synth_config(const std::vector<KeyValue>& pairs,
                               const std::string& source = "<world>");
SynthConfig load_synth_config(const std::filesystem::path& path);

Trajectory make_trajectory(const SynthConfig& config, TrajectoryKind kind);

}  // namespace lmbao
