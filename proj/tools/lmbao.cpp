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
// Command-line front end: run odometry, generate synthetic datasets, and
// evaluate trajectories.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lmbao/ate.hpp"
#include "lmbao/config.hpp"
#include "lmbao/pipeline.hpp"
#include "lmbao/scan_io.hpp"
#include "lmbao/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& dataset, const std::string& config_path, const std::string& out,
            const std::string& gt, const std::string& report, const std::string& cost_trace) {
  const lmbao::OdometryConfig config =
      config_path.empty() ? lmbao::OdometryConfig{} : lmbao::load_odometry_config(config_path);
  lmbao::RunOptions opts;
  opts.dataset = dataset;
  opts.trajectory_out = out;
  if (!gt.empty()) opts.ground_truth = gt;
  if (!report.empty()) opts.report_out = report;
  if (!cost_trace.empty()) opts.cost_trace_out = cost_trace;
  const lmbao::RunReport r = lmbao::run_dataset(config, opts);

  long unconverged = 0;
  for (const auto& rec : r.records) unconverged += rec.converged ? 0 : 1;
  std::printf("odometry trajectory: %zu poses written to %s\n", r.trajectory.size(), out.c_str());
  std::printf("mean per-scan time: %.2f ms (%.1f Hz)\n", r.mean_time_ms,
              r.mean_time_ms > 0.0 ? 1000.0 / r.mean_time_ms : 0.0);
  if (unconverged > 0) std::printf("warning: %ld window solves hit the iteration limit\n", unconverged);
  if (r.ate_rmse) std::printf("ATE RMSE: %.6f m\n", *r.ate_rmse);
  return 0;
}

int cmd_synth(const std::string& world_path, const std::string& kind, const std::string& out,
              int scans_override) {
  lmbao::SynthConfig cfg =
      world_path.empty() ? lmbao::SynthConfig{} : lmbao::load_synth_config(world_path);
  if (scans_override > 0) cfg.num_scans = scans_override;
  const auto world = lmbao::generate_world(cfg.world, cfg.seed);
  const auto traj = lmbao::make_trajectory(cfg, lmbao::parse_trajectory_kind(kind));
  const auto run = lmbao::simulate_run(world, traj, cfg.beam, cfg.num_scans, cfg.scan_period);

  const fs::path scan_dir = fs::path(out) / "scans";
  fs::create_directories(scan_dir);
  char name[32];
  for (const auto& scan : run.scans) {
    std::snprintf(name, sizeof(name), "%06d.txt", scan.index);
    lmbao::write_scan_file(scan, scan_dir / name);
  }
  lmbao::write_trajectory(run.ground_truth, fs::path(out) / "groundtruth.txt");
  std::printf("wrote %zu scans (%zu planes, %zu edges) to %s\n", run.scans.size(),
              world.planes.size(), world.edges.size(), out.c_str());
  return 0;
}

int cmd_eval(const std::string& est, const std::string& gt) {
  const auto r = lmbao::ate_rmse(lmbao::read_trajectory(est), lmbao::read_trajectory(gt));
  std::printf("ATE RMSE: %.6f m over %d poses\n", r.rmse, r.pairs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lmbao: landmark-based LiDAR bundle-adjustment odometry"};
  app.require_subcommand(1);

  std::string dataset, config, out, gt, report, cost_trace;
  long seed = 0;
  auto* run = app.add_subcommand("run", "Estimate an odometry trajectory from a scan directory");
  run->add_option("--dataset", dataset, "Directory of scan files")->required()->check(CLI::ExistingDirectory);
  run->add_option("--config", config, "key=value configuration file")->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output trajectory file")->required();
  run->add_option("--gt", gt, "Ground-truth trajectory for ATE")->check(CLI::ExistingFile);
  run->add_option("--report", report, "Per-scan report file");
  run->add_option("--cost-trace", cost_trace, "Per-iteration cost rows");
  run->add_option("--seed", seed, "Accepted for interface compatibility; the engine is deterministic");

  std::string world, kind = "constant_twist", synth_out;
  int scans = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--world", world, "World/beam/trajectory configuration")->check(CLI::ExistingFile);
  synth->add_option("--trajectory", kind, "stationary | constant_twist | square_loop");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--scans", scans, "Override the number of scans");

  std::string est, eval_gt;
  auto* eval = app.add_subcommand("eval", "Print the ATE RMSE of an estimate");
  eval->add_option("--est", est, "Estimated trajectory")->required()->check(CLI::ExistingFile);
  eval->add_option("--gt", eval_gt, "Ground-truth trajectory")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(dataset, config, out, gt, report, cost_trace);
    if (*synth) return cmd_synth(world, kind, synth_out, scans);
    if (*eval) return cmd_eval(est, eval_gt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
