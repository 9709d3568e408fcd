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
#include "lmbao/motion_model.hpp"

#include <stdexcept>
#include <string>

namespace lmbao {

Vec3 compensate_point(const Vec3& p, double t_i, const MotionState& state) {
  if (!(t_i >= state.start_time)) {
    throw std::invalid_argument("compensate_point: point time " + std::to_string(t_i) +
                                " precedes scan start " + std::to_string(state.start_time));
  }
  return compensate_point_unchecked(p, t_i, state);
}

Vec3 to_world(const MotionState& state, const Vec3& p_compensated) {
  return transform_point(state.transform, p_compensated);
}

MotionState predict_next_state(const MotionState& state, double t_next) {
  if (!(t_next >= state.start_time)) {
    throw std::invalid_argument("predict_next_state: time must not decrease");
  }
  const double dt = t_next - state.start_time;
  const Mat3 step = exp_so3(dt * state.angular_velocity);
  const Mat3 back = exp_so3(-dt * state.angular_velocity);

  RigidTransform relative;
  relative.rotation = step;
  relative.translation = dt * state.linear_velocity;

  MotionState next;
  next.transform = compose(state.transform, relative);
  next.linear_velocity = back * state.linear_velocity;
  // Numerically equal to w (a rotation fixes its own axis); kept in the
  // general form so a different motion model only touches this line.
  next.angular_velocity = back * state.angular_velocity;
  next.start_time = t_next;
  return next;
}

}  // namespace lmbao
