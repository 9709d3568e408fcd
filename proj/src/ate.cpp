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
#include "lmbao/ate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace lmbao {

RigidTransform align_rigid(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
  if (src.size() != dst.size() || src.empty()) {
    throw std::invalid_argument("align_rigid: point sets must be non-empty and equal in size");
  }
  Vec3 mu_s = Vec3::Zero();
  Vec3 mu_d = Vec3::Zero();
  for (size_t i = 0; i < src.size(); ++i) {
    mu_s += src[i];
    mu_d += dst[i];
  }
  mu_s /= static_cast<double>(src.size());
  mu_d /= static_cast<double>(src.size());
  Mat3 h = Mat3::Zero();
  for (size_t i = 0; i < src.size(); ++i) h += (src[i] - mu_s) * (dst[i] - mu_d).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  RigidTransform t;
  t.rotation = svd.matrixV() * d * svd.matrixU().transpose();
  t.translation = mu_d - t.rotation * mu_s;
  return t;
}

AteResult ate_rmse(const std::vector<StampedPose>& estimated,
                   const std::vector<StampedPose>& ground_truth, double tolerance) {
  if (ground_truth.empty() || estimated.empty()) {
    throw std::invalid_argument("ate_rmse: fewer than 2 associated pose pairs");
  }
  std::vector<double> gt_times;
  gt_times.reserve(ground_truth.size());
  for (const auto& g : ground_truth) gt_times.push_back(g.time);
  if (!std::is_sorted(gt_times.begin(), gt_times.end())) {
    throw std::invalid_argument("ate_rmse: ground truth timestamps must be sorted");
  }
  if (!(tolerance > 0.0)) {
    std::vector<double> gaps;
    for (size_t i = 1; i < gt_times.size(); ++i) gaps.push_back(gt_times[i] - gt_times[i - 1]);
    if (gaps.empty()) {
      tolerance = 1e-6;
    } else {
      std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
      tolerance = 0.5 * gaps[gaps.size() / 2];
    }
  }

  std::vector<Vec3> est_pts;
  std::vector<Vec3> gt_pts;
  for (const auto& e : estimated) {
    auto it = std::lower_bound(gt_times.begin(), gt_times.end(), e.time);
    long best = -1;
    double best_dt = tolerance;
    for (auto cand : {it, it == gt_times.begin() ? it : it - 1}) {
      if (cand == gt_times.end()) continue;
      const double dt = std::abs(*cand - e.time);
      if (dt <= best_dt) {
        best_dt = dt;
        best = cand - gt_times.begin();
      }
    }
    if (best < 0) continue;
    est_pts.push_back(e.pose.translation);
    gt_pts.push_back(ground_truth[best].pose.translation);
  }
  if (est_pts.size() < 2) throw std::invalid_argument("ate_rmse: fewer than 2 associated pose pairs");

  AteResult r;
  r.pairs = static_cast<int>(est_pts.size());
  r.alignment = align_rigid(est_pts, gt_pts);
  double sum = 0.0;
  for (size_t i = 0; i < est_pts.size(); ++i) {
    sum += (r.alignment * est_pts[i] - gt_pts[i]).squaredNorm();
  }
  r.rmse = std::sqrt(sum / static_cast<double>(est_pts.size()));
  return r;
}

}  // namespace lmbao
