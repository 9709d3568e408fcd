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
#include "lmbao/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "lmbao/ate.hpp"
#include "lmbao/feature_extract.hpp"
#include "lmbao/optimizer.hpp"

namespace lmbao {

PipelineError::PipelineError(int scan_index, const std::string& stage, const std::string& what)
    : std::runtime_error("scan " + std::to_string(scan_index) + " (" + stage + "): " + what),
      scan_index_(scan_index),
      stage_(stage) {}

OdometryEngine::OdometryEngine(OdometryConfig config)
    : config_((validate(config), config)), map_(config_.landmarks), window_(config_.window_size) {}

MotionState OdometryEngine::state_of(int scan_index) const {
  auto s = window_.state_of(scan_index);
  if (!s) throw std::logic_error("no state for scan " + std::to_string(scan_index));
  return *s;
}

MotionState OdometryEngine::process_scan(const Scan& scan) {
  const auto t0 = std::chrono::steady_clock::now();
  const int idx = scan.index;
  std::string stage = "input";
  try {
    if (scan.points.empty()) throw std::invalid_argument("scan has no points");
    if (last_index_ >= 0 && (idx <= last_index_ || !(scan.start_time > scan_times_.back()))) {
      throw std::invalid_argument("scan out of order");
    }

    stage = "predict";
    MotionState predicted = MotionState::at_rest(scan.start_time);
    if (last_index_ >= 0) predicted = predict_next_state(state_of(last_index_), scan.start_time);

    stage = "features";
    const auto clusters = extract_features(scan, predicted, config_.features);
    long feature_points = 0;
    for (const auto& c : clusters) feature_points += static_cast<long>(c.members.size());

    stage = "associate";
    const StateLookup lookup = [this](int s) { return state_of(s); };
    map_.refresh_geometry(lookup);
    const AssociationReport assoc = map_.associate(clusters, predicted, idx);
    window_.push(idx, predicted);
    last_index_ = idx;
    scan_times_.push_back(scan.start_time);

    ScanRecord rec;
    rec.index = idx;
    rec.time = scan.start_time;
    rec.created = static_cast<long>(assoc.created.size());
    rec.feature_points = feature_points;

    if (window_.size() >= 2) {
      stage = "optimize";
      const OptimizeResult res = optimize_window(map_, window_, config_.lm);
      window_.set_states(res.states);
      rec.cost_final = res.cost_trace.back();
      rec.lm_iters = res.iterations;
      rec.converged = res.converged;
      for (size_t i = 0; i < res.cost_trace.size(); ++i) {
        cost_trace_.push_back({idx, static_cast<int>(i), res.cost_trace[i]});
      }
    }

    stage = "maintenance";
    rec.deleted += static_cast<long>(map_.update_observation_counts(assoc).size());
    rec.deleted += static_cast<long>(map_.check_drift_in_window(lookup).size());
    rec.deleted += static_cast<long>(map_.prune_small_planes(idx).size());

    const MotionState newest = window_.entries().back().state;
    if (window_.full()) {
      stage = "marginalize";
      marginalize_scan(map_, window_);
    }

    rec.landmarks_active = static_cast<long>(map_.size());
    rec.online_pose = newest.transform;
    rec.time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    records_.push_back(rec);
    return newest;
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(idx, stage, e.what());
  }
}

std::vector<StampedPose> OdometryEngine::trajectory() const {
  std::vector<StampedPose> out;
  for (const auto& [scan, state] : window_.fixed()) out.push_back({state.start_time, state.transform});
  for (const auto& e : window_.entries()) out.push_back({e.state.start_time, e.state.transform});
  return out;
}

std::string format_report(const std::vector<ScanRecord>& records, bool include_timing) {
  std::string out = "# index time_ms cost_final landmarks_active created deleted lm_iters\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%d %.3f %.9g %ld %ld %ld %d\n", r.index,
                  include_timing ? r.time_ms : 0.0, r.cost_final, r.landmarks_active, r.created,
                  r.deleted, r.lm_iters);
    out += buf;
  }
  return out;
}

RunReport run_dataset(const OdometryConfig& config, const RunOptions& options) {
  const auto files = list_scan_files(options.dataset);
  OdometryEngine engine(config);
  for (size_t i = 0; i < files.size(); ++i) {
    Scan scan;
    try {
      scan = read_scan_file(files[i], static_cast<int>(i));
    } catch (const std::exception& e) {
      throw PipelineError(static_cast<int>(i), "read " + files[i].filename().string(), e.what());
    }
    engine.process_scan(scan);
  }

  RunReport report;
  report.records = engine.records();
  report.trajectory = engine.trajectory();
  double total = 0.0;
  for (const auto& r : report.records) total += r.time_ms;
  report.mean_time_ms = report.records.empty() ? 0.0 : total / static_cast<double>(report.records.size());

  write_trajectory(report.trajectory, options.trajectory_out);
  if (options.report_out) {
    std::ofstream out(*options.report_out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report " + options.report_out->string());
    out << format_report(report.records, config.report_timing);
  }
  if (options.cost_trace_out) {
    std::ofstream out(*options.cost_trace_out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write cost trace " + options.cost_trace_out->string());
    char buf[128];
    out << "# scan_index iter cost\n";
    for (const auto& row : engine.cost_trace()) {
      std::snprintf(buf, sizeof(buf), "%d %d %.12g\n", row.scan_index, row.iteration, row.cost);
      out << buf;
    }
  }
  if (options.ground_truth) {
    report.ate_rmse = ate_rmse(report.trajectory, read_trajectory(*options.ground_truth)).rmse;
  }
  return report;
}

}  // namespace lmbao
