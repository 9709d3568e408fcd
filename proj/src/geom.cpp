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
#include "lmbao/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace lmbao {

namespace {

constexpr double kSmallAngle = 1e-8;
constexpr double kRotationCheckTol = 1e-6;

Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

// Axis sign at a half turn: first component with |x| > eps is positive.
Vec3 canonical_axis(Vec3 axis) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(axis[i]) > 1e-12) {
      if (axis[i] < 0.0) axis = -axis;
      break;
    }
  }
  return axis;
}

}  // namespace

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Mat3 exp_so3(const Vec3& omega) {
  if (!omega.allFinite()) throw std::invalid_argument("exp_so3: non-finite rotation vector");
  const double theta2 = omega.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a;
  double b;
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 k = skew(omega);
  return Mat3::Identity() + a * k + b * k * k;
}

bool is_rotation(const Mat3& rot, double tol) {
  if (!rot.allFinite()) return false;
  return (rot * rot.transpose() - Mat3::Identity()).norm() <= tol &&
         std::abs(rot.determinant() - 1.0) <= tol;
}

Vec3 log_so3(const Mat3& rot) {
  if (!is_rotation(rot, kRotationCheckTol)) {
    throw std::invalid_argument("log_so3: input is not a rotation matrix");
  }
  const double cos_theta = std::clamp((rot.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  const Vec3 v = 0.5 * vee(rot - rot.transpose());  // sin(theta) * axis

  if (theta < 1e-6) {
    // theta/sin(theta) ~= 1 + theta^2/6
    return v * (1.0 + theta * theta / 6.0);
  }
  if (std::numbers::pi - theta > 1e-3) {
    return v * (theta / std::sin(theta));
  }

  // Near pi the skew part vanishes; read the axis from the symmetric part:
  // (R + R^T)/2 - cos(theta) I = (1 - cos(theta)) n n^T.
  const Mat3 nn = (0.5 * (rot + rot.transpose()) - cos_theta * Mat3::Identity()) /
                  (1.0 - cos_theta);
  int k = 0;
  nn.diagonal().maxCoeff(&k);
  Vec3 axis = nn.col(k) / std::sqrt(std::max(nn(k, k), 1e-300));
  axis.normalize();
  if (v.norm() > 1e-12) {
    if (axis.dot(v) < 0.0) axis = -axis;
  } else {
    axis = canonical_axis(axis);
  }
  return axis * theta;
}

Mat3 right_jacobian_so3(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 k = skew(phi);
  if (theta < 1e-5) {
    return Mat3::Identity() - 0.5 * k + k * k / 6.0;
  }
  return Mat3::Identity() - (1.0 - std::cos(theta)) / theta2 * k +
         (theta - std::sin(theta)) / (theta2 * theta) * k * k;
}

Mat3 right_jacobian_inv_so3(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 k = skew(phi);
  if (theta < 1e-5) {
    return Mat3::Identity() + 0.5 * k + k * k / 12.0;
  }
  const double c = 1.0 / theta2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() + 0.5 * k + c * k * k;
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation = rotation.transpose();
  out.translation = -(out.rotation * translation);
  return out;
}

Vec3 transform_point(const RigidTransform& t, const Vec3& p) { return t * p; }

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

}  // namespace lmbao
