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

#include "lmbao/geom.hpp"

namespace lmbao {

/// Pose at scan start plus the constant body-frame twist used across the sweep.
///
/// `linear_velocity` and `angular_velocity` are expressed in the scan frame
/// C_k; the sensor frame at time t (t >= start_time) relative to C_k is
/// [exp((t - t_k) w), (t - t_k) v].
struct MotionState {
  RigidTransform transform;
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
  double start_time = 0.0;

  static MotionState at_rest(double start_time) {
    MotionState s;
    s.start_time = start_time;
    return s;
  }
};

/// A raw sensor-frame point with its acquisition time.
struct TimedPoint {
  Vec3 position = Vec3::Zero();
  double timestamp = 0.0;
};

/// De-skews `p`, acquired at `t_i`, into the scan frame at `state.start_time`.
/// Throws std::invalid_argument if t_i precedes the scan start.
Vec3 compensate_point(const Vec3& p, double t_i, const MotionState& state);

/// Unchecked variant for hot loops; caller guarantees t_i >= start_time.
inline Vec3 compensate_point_unchecked(const Vec3& p, double t_i, const MotionState& state) {
  const double dt = t_i - state.start_time;
  return exp_so3(dt * state.angular_velocity) * p + dt * state.linear_velocity;
}

/// Scan-frame (compensated) point to world frame.
Vec3 to_world(const MotionState& state, const Vec3& p_compensated);

/// Constant-velocity prediction of the state at `t_next`.
/// Throws std::invalid_argument if t_next < state.start_time.
MotionState predict_next_state(const MotionState& state, double t_next);

}  // namespace lmbao
