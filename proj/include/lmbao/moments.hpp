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

#include <optional>
#include <span>
#include <vector>

#include "lmbao/geom.hpp"

namespace lmbao {

/// Raw second and first moments of a point set: O = sum p p^T, S = sum p.
///
/// Sums of these are what marginalization folds in: once a scan's pose is
/// fixed its points only ever enter the covariance through (O, S, count).
struct MomentAccumulator {
  Mat3 second_moment = Mat3::Zero();
  Vec3 first_moment = Vec3::Zero();
  long count = 0;

  void add(const Vec3& p) {
    second_moment.noalias() += p * p.transpose();
    first_moment += p;
    ++count;
  }
  MomentAccumulator& operator+=(const MomentAccumulator& o) {
    second_moment += o.second_moment;
    first_moment += o.first_moment;
    count += o.count;
    return *this;
  }
  friend MomentAccumulator operator+(MomentAccumulator a, const MomentAccumulator& b) {
    return a += b;
  }
  bool operator==(const MomentAccumulator&) const = default;
};

MomentAccumulator scan_moments(std::span<const Vec3> points);

/// Covariance of a landmark with its ascending eigen-decomposition.
/// eigenvectors.col(0) is the plane normal, col(2) the edge direction.
struct LandmarkCovariance {
  Vec3 mean = Vec3::Zero();
  Mat3 cov = Mat3::Zero();
  Vec3 eigenvalues = Vec3::Zero();  // ascending
  Mat3 eigenvectors = Mat3::Identity();
  long count = 0;
};

/// Cov = O/N - (S/N)(S/N)^T, decomposed. Requires m.count >= 1.
LandmarkCovariance covariance_from_moments(const MomentAccumulator& m);

/// Marginal part plus freshly projected window points. Returns nullopt when
/// the total count is below `min_count`.
std::optional<LandmarkCovariance> landmark_covariance(
    const MomentAccumulator& marginal, std::span<const std::vector<Vec3>> window_points,
    long min_count = 1);

/// sqrt(max(lambda_1, 0)): RMS distance to the best-fit plane.
double plane_residual(const LandmarkCovariance& c);
/// sqrt(max(lambda_1, 0) + max(lambda_2, 0)): RMS distance to the best-fit line.
double edge_residual(const LandmarkCovariance& c);

/// rho(s) = s for s <= 1, 2 sqrt(s) - 1 otherwise. Throws on s < 0.
double huber(double s);
/// d rho / d s.
double huber_derivative(double s);

}  // namespace lmbao
