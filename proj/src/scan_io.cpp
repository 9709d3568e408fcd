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
#include "lmbao/scan_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include <Eigen/Geometry>

namespace lmbao {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// %.6f with trailing zeros (and a bare '.') removed; "-0" collapses to "0".
std::string trimmed6(double v) {
  std::string s = fixed6(v);
  if (s.find('.') != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

double header_value(const std::string& header, const std::string& key,
                    const std::filesystem::path& path) {
  const auto pos = header.find(key + "=");
  if (pos == std::string::npos) {
    throw ParseError(path.string() + ": header missing '" + key + "='", 1, 0);
  }
  const auto start = pos + key.size() + 1;
  auto stop = header.find_first_of(" \t\r", start);
  if (stop == std::string::npos) stop = header.size();
  double v = 0.0;
  if (!parse_double(std::string_view(header).substr(start, stop - start), v)) {
    throw ParseError(path.string() + ": bad header value for '" + key + "'", 1, 0);
  }
  return v;
}

}  // namespace

Scan read_scan_file(const std::filesystem::path& path, int index) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scan file: " + path.string());

  std::string line;
  if (!std::getline(in, line) || line.rfind("# lmbao-scan v1", 0) != 0) {
    throw ParseError(path.string() + ": missing '# lmbao-scan v1' header", 1, 0);
  }
  Scan scan;
  scan.index = index;
  scan.start_time = header_value(line, "start", path);
  scan.sweep_duration = header_value(line, "duration", path);
  if (!(scan.sweep_duration > 0.0)) {
    throw ParseError(path.string() + ": duration must be positive", 1, 0);
  }

  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    const auto fields = split_ws(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 4) {
      throw ParseError(path.string() + ": row " + std::to_string(row) + ": expected 4 fields, got " +
                           std::to_string(fields.size()),
                       row, 0);
    }
    double v[4];
    for (int c = 0; c < 4; ++c) {
      if (!parse_double(fields[c], v[c])) {
        throw ParseError(path.string() + ": row " + std::to_string(row) + " column " +
                             std::to_string(c + 1) + ": not a number '" + std::string(fields[c]) + "'",
                         row, c + 1);
      }
    }
    if (!scan.points.empty() && v[3] < scan.points.back().timestamp) {
      throw ParseError(path.string() + ": row " + std::to_string(row) + ": timestamps decrease", row, 4);
    }
    scan.points.push_back({Vec3(v[0], v[1], v[2]), v[3]});
  }
  if (scan.points.empty()) throw std::runtime_error("empty scan: " + path.string());
  if (std::abs(scan.points.front().timestamp - scan.start_time) > 1e-9) {
    throw ParseError(path.string() + ": start time differs from first point timestamp", 1, 0);
  }
  scan.start_time = scan.points.front().timestamp;
  return scan;
}

void write_scan_file(const Scan& scan, const std::filesystem::path& path) {
  if (scan.points.empty()) throw std::invalid_argument("write_scan_file: empty scan");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scan file: " + path.string());
  out << "# lmbao-scan v1 start=" << fixed6(scan.points.front().timestamp)
      << " duration=" << fixed6(scan.sweep_duration) << '\n';
  char buf[160];
  for (const auto& p : scan.points) {
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %.6f\n", p.position.x(), p.position.y(),
                  p.position.z(), p.timestamp);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::filesystem::path> list_scan_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("dataset is not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (files.empty()) throw std::runtime_error("no scans found in " + dir.string());
  std::sort(files.begin(), files.end());
  return files;
}

std::string format_trajectory_line(const StampedPose& pose) {
  Eigen::Quaterniond q(pose.pose.rotation);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3& t = pose.pose.translation;
  std::ostringstream os;
  os << fixed6(pose.time) << ' ' << trimmed6(t.x()) << ' ' << trimmed6(t.y()) << ' '
     << trimmed6(t.z()) << ' ' << trimmed6(q.x()) << ' ' << trimmed6(q.y()) << ' '
     << trimmed6(q.z()) << ' ' << trimmed6(q.w());
  return os.str();
}

void write_trajectory(const std::vector<StampedPose>& states, const std::filesystem::path& path) {
  for (size_t i = 1; i < states.size(); ++i) {
    if (states[i].time < states[i - 1].time) {
      throw std::invalid_argument("write_trajectory: states are not time-ordered");
    }
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory: " + path.string());
  for (const auto& s : states) out << format_trajectory_line(s) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<StampedPose> read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory: " + path.string());
  std::vector<StampedPose> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto fields = split_ws(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 8) {
      throw ParseError(path.string() + ": row " + std::to_string(row) + ": expected 8 fields", row, 0);
    }
    double v[8];
    for (int c = 0; c < 8; ++c) {
      if (!parse_double(fields[c], v[c])) {
        throw ParseError(path.string() + ": row " + std::to_string(row) + " column " +
                             std::to_string(c + 1) + ": not a number",
                         row, c + 1);
      }
    }
    Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
    if (q.norm() < 1e-6) throw ParseError(path.string() + ": zero quaternion", row, 5);
    q.normalize();
    StampedPose s;
    s.time = v[0];
    s.pose.translation = Vec3(v[1], v[2], v[3]);
    s.pose.rotation = q.toRotationMatrix();
    out.push_back(s);
  }
  return out;
}

}  // namespace lmbao
