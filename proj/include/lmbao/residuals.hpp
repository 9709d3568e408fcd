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

#include <span>
#include <vector>

#include <Eigen/Core>

#include "lmbao/geom.hpp"
#include "lmbao/moments.hpp"
#include "lmbao/motion_model.hpp"

namespace lmbao {

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Row12 = Eigen::Matrix<double, 1, 12>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat3x12 = Eigen::Matrix<double, 3, 12>;
using Mat9x12 = Eigen::Matrix<double, 9, 12>;

// Local increment layout of one state: [d_theta, d_p, d_v, d_omega].
inline constexpr int kRotBlock = 0;
inline constexpr int kPosBlock = 3;
inline constexpr int kVelBlock = 6;
inline constexpr int kOmegaBlock = 9;
inline constexpr int kStateDim = 12;

/// R <- R exp(d_theta), p <- p + d_p, v <- v + d_v, w <- w + d_w.
MotionState retract(const MotionState& s, const Vec12& delta);

struct ContinuityWeights {
  double position = 1.0;
  double rotation = 1.0;
  double angular = 0.1;
};

/// Nine-row smoothness residual between consecutive states a -> b,
/// dt = t_b - t_a:
///   [ w_p * (R_a dt v_a + p_a - p_b)
///     w_R * log(R_a exp(dt w_a) R_b^T)
///     w_w * (R_a w_a - R_b w_b) ]
/// Every block vanishes when b == predict_next_state(a, t_b).
Vec9 continuity_residual(const MotionState& a, const MotionState& b, const ContinuityWeights& w);

struct ContinuityJacobian {
  Mat9x12 wrt_a = Mat9x12::Zero();
  Mat9x12 wrt_b = Mat9x12::Zero();
};

ContinuityJacobian continuity_jacobian(const MotionState& a, const MotionState& b,
                                       const ContinuityWeights& w);
ContinuityJacobian continuity_jacobian_numeric(const MotionState& a, const MotionState& b,
                                               const ContinuityWeights& w, double step = 1e-6);

/// Compensated, world-projected point.
inline Vec3 world_point(const MotionState& s, const TimedPoint& p) {
  return s.transform * compensate_point_unchecked(p.position, p.timestamp, s);
}

/// d world_point / d state (3x12) under `retract`; also writes the point.
Mat3x12 world_point_jacobian(const MotionState& s, const TimedPoint& p, Vec3* world = nullptr);

enum class ResidualKind { Plane, Edge };

/// Raw points of one window scan; `slot` indexes the states span.
struct ScanObservation {
  int slot = 0;
  std::span<const TimedPoint> points;
};

/// Unweighted landmark residual (plane or edge) for the given window states.
/// Returns 0 when the landmark has no points at all.
double landmark_residual(ResidualKind kind, const MomentAccumulator& marginal,
                         std::span<const ScanObservation> observations,
                         std::span<const MotionState> states);

struct LandmarkJacobian {
  double residual = 0.0;
  std::vector<Row12> wrt_slot;  // one row per state, zero for unobserved slots
  bool finite_difference = false;
};

/// True when the eigenvalue that bounds the residual subspace is within
/// 1e-8 * trace of the next one (plane: l2 - l1, edge: l3 - l2).
bool eigen_gap_degenerate(ResidualKind kind, const LandmarkCovariance& c);

/// Analytic d eps / d state via first-order eigenvalue perturbation,
///   d lambda_i / d p_j = (2/N) u_i u_i^T (p_j - mean),
/// chained through compensation and the world transform. Falls back to
/// central differences when eigen_gap_degenerate.
LandmarkJacobian landmark_residual_jacobian(ResidualKind kind, const MomentAccumulator& marginal,
                                            std::span<const ScanObservation> observations,
                                            std::span<const MotionState> states);

LandmarkJacobian landmark_residual_jacobian_numeric(ResidualKind kind,
                                                    const MomentAccumulator& marginal,
                                                    std::span<const ScanObservation> observations,
                                                    std::span<const MotionState> states,
                                                    double step = 1e-6);

}  // namespace lmbao
