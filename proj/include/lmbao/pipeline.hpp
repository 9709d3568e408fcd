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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmbao/config.hpp"
#include "lmbao/landmark_map.hpp"
#include "lmbao/scan_io.hpp"
#include "lmbao/window.hpp"

namespace lmbao {

/// A failure inside the per-scan pipeline, tagged with where it happened.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(int scan_index, const std::string& stage, const std::string& what);
  int scan_index() const { return scan_index_; }
  const std::string& stage() const { return stage_; }

 private:
  int scan_index_;
  std::string stage_;
};

struct ScanRecord {
  int index = 0;
  double time = 0.0;
  RigidTransform online_pose;  // newest window state right after this scan
  double time_ms = 0.0;
  double cost_final = 0.0;
  long landmarks_active = 0;
  long created = 0;
  long deleted = 0;
  int lm_iters = 0;
  bool converged = true;
  long feature_points = 0;
};

struct CostTraceRow {
  int scan_index = 0;
  int iteration = 0;
  double cost = 0.0;
};

class OdometryEngine {
 public:
  explicit OdometryEngine(OdometryConfig config = {});

  /// Runs predict, feature extraction, association, window optimization,
  /// map maintenance and marginalization for one scan. Returns the newest
  /// optimized state. Scans must arrive with increasing index and time.
  MotionState process_scan(const Scan& scan);

  const OdometryConfig& config() const { return config_; }
  const LandmarkMap& map() const { return map_; }
  const SlidingWindow& window() const { return window_; }
  const std::vector<ScanRecord>& records() const { return records_; }
  const std::vector<CostTraceRow>& cost_trace() const { return cost_trace_; }

  /// Best current estimate of every processed scan: fixed states followed by
  /// the window.
  std::vector<StampedPose> trajectory() const;

 private:
  MotionState state_of(int scan_index) const;

  OdometryConfig config_;
  LandmarkMap map_;
  SlidingWindow window_;
  std::vector<ScanRecord> records_;
  std::vector<CostTraceRow> cost_trace_;
  std::vector<double> scan_times_;
  int last_index_ = -1;
};

struct RunOptions {
  std::filesystem::path dataset;
  std::filesystem::path trajectory_out;
  std::optional<std::filesystem::path> ground_truth;
  std::optional<std::filesystem::path> report_out;
  std::optional<std::filesystem::path> cost_trace_out;
};

struct RunReport {
  std::vector<ScanRecord> records;
  std::vector<StampedPose> trajectory;
  std::optional<double> ate_rmse;
  double mean_time_ms = 0.0;
};

/// `index time_ms cost_final landmarks_active created deleted lm_iters`
/// table with a header comment; time_ms is 0 when timing is disabled.
std::string format_report(const std::vector<ScanRecord>& records, bool include_timing);

/// Processes every scan file of `options.dataset` in name order, then
/// writes the trajectory and the optional report and cost trace.
RunReport run_dataset(const OdometryConfig& config, const RunOptions& options);

}  // namespace lmbao
