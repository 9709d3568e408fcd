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
#include "lmbao/residuals.hpp"

#include <cmath>

namespace lmbao {

namespace {

MomentAccumulator total_moments(const MomentAccumulator& marginal,
                                std::span<const ScanObservation> observations,
                                std::span<const MotionState> states) {
  MomentAccumulator m = marginal;
  for (const auto& obs : observations) {
    const MotionState& s = states[obs.slot];
    for (const auto& p : obs.points) m.add(world_point(s, p));
  }
  return m;
}

double residual_from(ResidualKind kind, const LandmarkCovariance& c) {
  return kind == ResidualKind::Plane ? plane_residual(c) : edge_residual(c);
}

}  // namespace

MotionState retract(const MotionState& s, const Vec12& delta) {
  MotionState out = s;
  out.transform.rotation = s.transform.rotation * exp_so3(delta.segment<3>(kRotBlock));
  out.transform.translation = s.transform.translation + delta.segment<3>(kPosBlock);
  out.linear_velocity = s.linear_velocity + delta.segment<3>(kVelBlock);
  out.angular_velocity = s.angular_velocity + delta.segment<3>(kOmegaBlock);
  return out;
}

Vec9 continuity_residual(const MotionState& a, const MotionState& b, const ContinuityWeights& w) {
  const double dt = b.start_time - a.start_time;
  const Mat3& ra = a.transform.rotation;
  const Mat3& rb = b.transform.rotation;
  Vec9 r;
  r.segment<3>(0) =
      w.position * (ra * (dt * a.linear_velocity) + a.transform.translation - b.transform.translation);
  r.segment<3>(3) = w.rotation * log_so3(ra * exp_so3(dt * a.angular_velocity) * rb.transpose());
  r.segment<3>(6) = w.angular * (ra * a.angular_velocity - rb * b.angular_velocity);
  return r;
}

ContinuityJacobian continuity_jacobian(const MotionState& a, const MotionState& b,
                                       const ContinuityWeights& w) {
  const double dt = b.start_time - a.start_time;
  const Mat3& ra = a.transform.rotation;
  const Mat3& rb = b.transform.rotation;
  const Vec3 step = dt * a.angular_velocity;
  const Mat3 e = exp_so3(step);
  const Vec3 r_rot = log_so3(ra * e * rb.transpose());
  const Mat3 jr_inv = right_jacobian_inv_so3(r_rot);

  ContinuityJacobian j;
  // Translation consistency.
  j.wrt_a.block<3, 3>(0, kRotBlock) = -w.position * ra * skew(dt * a.linear_velocity);
  j.wrt_a.block<3, 3>(0, kPosBlock) = w.position * Mat3::Identity();
  j.wrt_a.block<3, 3>(0, kVelBlock) = w.position * dt * ra;
  j.wrt_b.block<3, 3>(0, kPosBlock) = -w.position * Mat3::Identity();
  // Rotation consistency: log(M exp(phi)) ~= log(M) + Jr^-1 phi.
  j.wrt_a.block<3, 3>(3, kRotBlock) = w.rotation * jr_inv * rb * e.transpose();
  j.wrt_a.block<3, 3>(3, kOmegaBlock) = w.rotation * jr_inv * rb * dt * right_jacobian_so3(step);
  j.wrt_b.block<3, 3>(3, kRotBlock) = -w.rotation * jr_inv * rb;
  // World-frame angular velocity consistency.
  j.wrt_a.block<3, 3>(6, kRotBlock) = -w.angular * ra * skew(a.angular_velocity);
  j.wrt_a.block<3, 3>(6, kOmegaBlock) = w.angular * ra;
  j.wrt_b.block<3, 3>(6, kRotBlock) = w.angular * rb * skew(b.angular_velocity);
  j.wrt_b.block<3, 3>(6, kOmegaBlock) = -w.angular * rb;
  return j;
}

ContinuityJacobian continuity_jacobian_numeric(const MotionState& a, const MotionState& b,
                                               const ContinuityWeights& w, double step) {
  ContinuityJacobian j;
  for (int k = 0; k < kStateDim; ++k) {
    Vec12 d = Vec12::Zero();
    d[k] = step;
    j.wrt_a.col(k) = (continuity_residual(retract(a, d), b, w) -
                      continuity_residual(retract(a, -d), b, w)) / (2.0 * step);
    j.wrt_b.col(k) = (continuity_residual(a, retract(b, d), w) -
                      continuity_residual(a, retract(b, -d), w)) / (2.0 * step);
  }
  return j;
}

Mat3x12 world_point_jacobian(const MotionState& s, const TimedPoint& p, Vec3* world) {
  const double tau = p.timestamp - s.start_time;
  const Vec3 phi = tau * s.angular_velocity;
  const Mat3 e = exp_so3(phi);
  const Vec3 q = e * p.position + tau * s.linear_velocity;
  const Mat3& r = s.transform.rotation;
  if (world) *world = r * q + s.transform.translation;

  Mat3x12 a;
  a.block<3, 3>(0, kRotBlock) = -r * skew(q);
  a.block<3, 3>(0, kPosBlock).setIdentity();
  a.block<3, 3>(0, kVelBlock) = tau * r;
  a.block<3, 3>(0, kOmegaBlock) = -tau * r * e * skew(p.position) * right_jacobian_so3(phi);
  return a;
}

double landmark_residual(ResidualKind kind, const MomentAccumulator& marginal,
                         std::span<const ScanObservation> observations,
                         std::span<const MotionState> states) {
  const MomentAccumulator m = total_moments(marginal, observations, states);
  if (m.count == 0) return 0.0;
  return residual_from(kind, covariance_from_moments(m));
}

bool eigen_gap_degenerate(ResidualKind kind, const LandmarkCovariance& c) {
  const double trace = std::max(c.eigenvalues.sum(), 0.0);
  const double gap = kind == ResidualKind::Plane ? c.eigenvalues[1] - c.eigenvalues[0]
                                                 : c.eigenvalues[2] - c.eigenvalues[1];
  return gap <= 1e-8 * trace;
}

LandmarkJacobian landmark_residual_jacobian_numeric(ResidualKind kind,
                                                    const MomentAccumulator& marginal,
                                                    std::span<const ScanObservation> observations,
                                                    std::span<const MotionState> states,
                                                    double step) {
  LandmarkJacobian out;
  out.finite_difference = true;
  out.residual = landmark_residual(kind, marginal, observations, states);
  out.wrt_slot.assign(states.size(), Row12::Zero());
  std::vector<MotionState> perturbed(states.begin(), states.end());
  for (const auto& obs : observations) {
    const int slot = obs.slot;
    if (obs.points.empty()) continue;
    for (int k = 0; k < kStateDim; ++k) {
      Vec12 d = Vec12::Zero();
      d[k] = step;
      perturbed[slot] = retract(states[slot], d);
      const double plus = landmark_residual(kind, marginal, observations, perturbed);
      perturbed[slot] = retract(states[slot], -d);
      const double minus = landmark_residual(kind, marginal, observations, perturbed);
      perturbed[slot] = states[slot];
      out.wrt_slot[slot][k] = (plus - minus) / (2.0 * step);
    }
  }
  return out;
}

LandmarkJacobian landmark_residual_jacobian(ResidualKind kind, const MomentAccumulator& marginal,
                                            std::span<const ScanObservation> observations,
                                            std::span<const MotionState> states) {
  const MomentAccumulator m = total_moments(marginal, observations, states);
  LandmarkJacobian out;
  out.wrt_slot.assign(states.size(), Row12::Zero());
  if (m.count == 0) return out;
  const LandmarkCovariance c = covariance_from_moments(m);
  if (eigen_gap_degenerate(kind, c)) {
    return landmark_residual_jacobian_numeric(kind, marginal, observations, states);
  }
  out.residual = residual_from(kind, c);
  if (out.residual <= 0.0) return out;

  const int n_dirs = kind == ResidualKind::Plane ? 1 : 2;
  const double scale = (2.0 / static_cast<double>(m.count)) / (2.0 * out.residual);
  for (const auto& obs : observations) {
    Row12 acc = Row12::Zero();
    for (const auto& p : obs.points) {
      Vec3 w;
      const Mat3x12 a = world_point_jacobian(states[obs.slot], p, &w);
      const Vec3 d = w - c.mean;
      for (int i = 0; i < n_dirs; ++i) {
        const Vec3 u = c.eigenvectors.col(i);
        acc.noalias() += (u.dot(d)) * (u.transpose() * a);
      }
    }
    out.wrt_slot[obs.slot] += scale * acc;
  }
  return out;
}

}  // namespace lmbao
