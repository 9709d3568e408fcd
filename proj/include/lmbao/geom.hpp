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

#include <Eigen/Dense>

namespace lmbao {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Skew-symmetric matrix [v]x so that skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& v);

/// Exponential map so(3) -> SO(3) (Rodrigues). Throws std::invalid_argument
/// on non-finite input.
Mat3 exp_so3(const Vec3& omega);

/// Logarithm SO(3) -> so(3), angle in [0, pi].
///
/// At exactly pi the axis is ambiguous up to sign; the returned axis has its
/// first nonzero component positive. Throws std::invalid_argument when the
/// input is not a rotation (orthonormality or determinant off by > 1e-6).
Vec3 log_so3(const Mat3& rot);

/// Right Jacobian of SO(3): exp(phi + d) ~= exp(phi) * exp(Jr(phi) * d).
Mat3 right_jacobian_so3(const Vec3& phi);
/// Inverse of right_jacobian_so3: log(exp(phi) * exp(d)) ~= phi + Jr^-1(phi) * d.
Mat3 right_jacobian_inv_so3(const Vec3& phi);

bool is_rotation(const Mat3& rot, double tol = 1e-9);

/// Rigid-body transform p -> rotation * p + translation.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
};

Vec3 transform_point(const RigidTransform& t, const Vec3& p);

/// (a o b)(p) == a(b(p)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return compose(a, b);
}

}  // namespace lmbao
