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
#include <functional>
#include <string>
#include <vector>

#include "lmbao/geom.hpp"
#include "lmbao/motion_model.hpp"
#include "lmbao/scan_io.hpp"

namespace lmbao {

/// Rectangle: center + normal, spanned by axis_u and normal x axis_u.
struct PlanePatch {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  Vec3 axis_u = Vec3::UnitX();
  double half_u = 1.0;
  double half_v = 1.0;

  Vec3 axis_v() const { return normal.cross(axis_u); }
};

/// A line feature (pole, wire). Rays passing within the beam's angular
/// aperture return the closest point on the axis, so returns lie exactly on
/// the line.
struct EdgeSegment {
  Vec3 center = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
  double half_length = 1.0;
};

struct SyntheticWorld {
  std::vector<PlanePatch> planes;
  std::vector<EdgeSegment> edges;
  std::uint64_t seed = 0;
};

enum class WorldLayout { Random, Corridor, Loop };

struct WorldConfig {
  WorldLayout layout = WorldLayout::Random;
  int num_planes = 0;  // random planes (Random) or boxes (Corridor/Loop)
  int num_edges = 0;   // random segments (Random) or poles (Corridor/Loop)
  Vec3 bounds_min = Vec3(-20.0, -20.0, -3.0);
  Vec3 bounds_max = Vec3(20.0, 20.0, 5.0);
  double min_half_extent = 0.5;
  double max_half_extent = 4.0;

  // Corridor: runs along +x from corridor_start to corridor_end.
  double corridor_start = -10.0;
  double corridor_end = 60.0;
  double corridor_half_width = 2.5;
  double floor_z = -1.2;
  double ceiling_z = 1.8;

  // Loop: rounded-square road of straight length loop_side and corner radius
  // loop_corner_radius around a central block; road width 2*corridor_half_width.
  double loop_side = 8.0;
  double loop_corner_radius = 2.0;
  double loop_wall_top = 2.0;
};

SyntheticWorld generate_world(const WorldConfig& config, std::uint64_t seed);

/// Rotary LiDAR: `columns` firings over the sweep, each firing all `rings`
/// at elevations evenly spaced in [elev_min_deg, elev_max_deg].
struct BeamModel {
  int columns = 1800;
  int rings = 64;
  double elev_min_deg = -25.0;
  double elev_max_deg = 15.0;
  double min_range = 0.3;
  double max_range = 120.0;
  double noise_sigma = 0.0;  // along-ray Gaussian range noise, meters
  double edge_aperture = 0.5;  // line-feature capture half-angle, in column steps

  double column_step() const;
  double ring_elevation(int ring) const;  // radians
};

using PoseFunction = std::function<RigidTransform(double)>;

/// Sensor trajectory as a continuous pose function with known twist.
class Trajectory {
 public:
  static Trajectory stationary(const RigidTransform& pose);
  /// Exactly the constant-velocity model: T(t) = T0 * [exp(t w), t v].
  static Trajectory constant_twist(const RigidTransform& start, const Vec3& v, const Vec3& w);
  /// Counter-clockwise rounded square of side `side` (straight part) and
  /// corner radius `radius`, centered at the origin at height z, starting in
  /// the middle of the bottom straight heading +x.
  static Trajectory square_loop(double side, double radius, double speed, double z = 0.0);

  RigidTransform pose(double t) const { return pose_(t); }
  PoseFunction function() const { return pose_; }
  /// State at t with body-frame twist (exact for constant_twist, central
  /// differences otherwise).
  MotionState state_at(double t) const;
  double path_length(double t0, double t1, int steps = 2000) const;

 private:
  PoseFunction pose_;
  bool exact_twist_ = false;
  Vec3 v_ = Vec3::Zero();
  Vec3 w_ = Vec3::Zero();
};

/// One ray-cast sweep. Points are expressed in the sensor frame at their own
/// timestamp, so the returned scan carries genuine ego-motion distortion.
/// Noise uses a generator seeded from (world.seed, index).
/// Throws std::runtime_error when no ray hits anything.
Scan simulate_scan(const SyntheticWorld& world, const PoseFunction& trajectory, double t_start,
                   double sweep_duration, const BeamModel& beam, int index = 0);

struct SyntheticRun {
  std::vector<Scan> scans;
  std::vector<StampedPose> ground_truth;  // relative to the first scan pose
  std::vector<MotionState> true_states;   // world frame of the generator
};

SyntheticRun simulate_run(const SyntheticWorld& world, const Trajectory& trajectory,
                          const BeamModel& beam, int num_scans, double scan_period = 0.1,
                          double t0 = 0.0);

}  // namespace lmbao
