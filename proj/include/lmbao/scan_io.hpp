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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmbao/geom.hpp"
#include "lmbao/motion_model.hpp"

namespace lmbao {

using RawPoint = TimedPoint;

/// One LiDAR sweep. Points are in the sensor frame at their own timestamp.
struct Scan {
  int index = 0;
  double start_time = 0.0;
  double sweep_duration = 0.1;
  std::vector<RawPoint> points;
};

/// Raised for malformed scan or trajectory files. `row` is 1-based (0 when the
/// error is not tied to a row); `column` is 1-based field index or 0.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int row, int column)
      : std::runtime_error(what), row_(row), column_(column) {}
  int row() const { return row_; }
  int column() const { return column_; }

 private:
  int row_;
  int column_;
};

/// Reads `# lmbao-scan v1 start=<t> duration=<d>` followed by `x y z t` rows.
/// Throws std::runtime_error (missing file, empty scan) or ParseError.
Scan read_scan_file(const std::filesystem::path& path, int index = 0);

/// Writes a scan at 6-decimal precision. The header start time is the first
/// point's timestamp so the start/first-point invariant survives the round trip.
void write_scan_file(const Scan& scan, const std::filesystem::path& path);

/// Lexicographically sorted regular files of `dir`. Throws if none exist.
std::vector<std::filesystem::path> list_scan_files(const std::filesystem::path& dir);

struct StampedPose {
  double time = 0.0;
  RigidTransform pose;
};

/// One `timestamp tx ty tz qx qy qz qw` line. The timestamp is fixed 6-decimal;
/// pose fields are 6-decimal with trailing zeros trimmed. qw >= 0.
std::string format_trajectory_line(const StampedPose& pose);

void write_trajectory(const std::vector<StampedPose>& states, const std::filesystem::path& path);
std::vector<StampedPose> read_trajectory(const std::filesystem::path& path);

}  // namespace lmbao
