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
#include "lmbao/moments.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace lmbao {

MomentAccumulator scan_moments(std::span<const Vec3> points) {
  MomentAccumulator m;
  for (const auto& p : points) m.add(p);
  return m;
}

LandmarkCovariance covariance_from_moments(const MomentAccumulator& m) {
  if (m.count < 1) throw std::invalid_argument("covariance_from_moments: empty accumulator");
  LandmarkCovariance c;
  c.count = m.count;
  const double inv_n = 1.0 / static_cast<double>(m.count);
  c.mean = m.first_moment * inv_n;
  c.cov = m.second_moment * inv_n - c.mean * c.mean.transpose();
  c.cov = 0.5 * (c.cov + c.cov.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat3> es(c.cov);
  c.eigenvalues = es.eigenvalues();
  c.eigenvectors = es.eigenvectors();
  return c;
}

std::optional<LandmarkCovariance> landmark_covariance(
    const MomentAccumulator& marginal, std::span<const std::vector<Vec3>> window_points,
    long min_count) {
  MomentAccumulator total = marginal;
  for (const auto& scan_points : window_points) {
    for (const auto& p : scan_points) total.add(p);
  }
  if (total.count < std::max<long>(min_count, 1)) return std::nullopt;
  return covariance_from_moments(total);
}

double plane_residual(const LandmarkCovariance& c) {
  return std::sqrt(std::max(c.eigenvalues[0], 0.0));
}

double edge_residual(const LandmarkCovariance& c) {
  return std::sqrt(std::max(c.eigenvalues[0], 0.0) + std::max(c.eigenvalues[1], 0.0));
}

double huber(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("huber: argument must be non-negative");
  return s <= 1.0 ? s : 2.0 * std::sqrt(s) - 1.0;
}

double huber_derivative(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("huber_derivative: argument must be non-negative");
  return s <= 1.0 ? 1.0 : 1.0 / std::sqrt(s);
}

}  // namespace lmbao
