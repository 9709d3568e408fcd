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
#include "lmbao/landmark_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace lmbao {

namespace {

using CellKey = std::tuple<long, long, long>;

CellKey cell_of(const Vec3& p, double size) {
  return {static_cast<long>(std::floor(p.x() / size)), static_cast<long>(std::floor(p.y() / size)),
          static_cast<long>(std::floor(p.z() / size))};
}

std::uint64_t hash_cell(long x, long y, long z) {
  return (static_cast<std::uint64_t>(x) * 73856093ULL) ^ (static_cast<std::uint64_t>(y) * 19349663ULL) ^
         (static_cast<std::uint64_t>(z) * 83492791ULL);
}

int normal_bin(const FeaturePoint& p) {
  if (!p.has_normal) return 3;
  int axis = 0;
  p.normal.cwiseAbs().maxCoeff(&axis);
  return axis;
}

bool fit_acceptable(FeatureCategory cat, const std::vector<const FeaturePoint*>& pts,
                    const LandmarkParams& params) {
  MomentAccumulator m;
  for (const auto* p : pts) m.add(p->compensated_position);
  const LandmarkCovariance c = covariance_from_moments(m);
  const Vec3 l = c.eigenvalues.cwiseMax(0.0);
  if (cat == FeatureCategory::Plane) {
    return std::sqrt(l[0]) <= params.plane_fit_max && l[1] >= 4.0 * l[0];
  }
  return std::sqrt(l[0] + l[1]) <= params.edge_fit_max && l[2] > 4.0 * (l[0] + l[1]);
}

}  // namespace

std::optional<Landmark> create_landmark(const FeatureCluster& cluster,
                                        const MotionState& predicted, int scan_index,
                                        const LandmarkParams& params) {
  if (cluster.members.empty()) return std::nullopt;
  Vec3 centroid = Vec3::Zero();
  for (const auto& m : cluster.members) centroid += m.compensated_position;
  centroid /= static_cast<double>(cluster.members.size());
  double max_dist = 0.0;
  for (const auto& m : cluster.members) {
    max_dist = std::max(max_dist, (m.compensated_position - centroid).norm());
  }
  if (!(max_dist > 0.0)) return std::nullopt;

  Landmark lm;
  lm.category = cluster.category;
  lm.center = centroid;
  lm.radius = std::clamp(max_dist, params.radius_min, params.radius_max);
  lm.initial_global_center = predicted.transform * centroid;
  lm.global_center = lm.initial_global_center;
  lm.observation_count = params.obs_count_init;
  lm.creation_scan = scan_index;
  auto& pts = lm.points_by_scan[scan_index];
  pts.reserve(cluster.members.size());
  for (const auto& m : cluster.members) pts.push_back({m.raw_position, m.timestamp});
  lm.total_points = static_cast<long>(pts.size());
  return lm;
}

LandmarkMap::LandmarkMap(LandmarkParams params) : params_(params) {
  if (!(params_.radius_min > 0.0) || params_.radius_max < params_.radius_min) {
    throw std::invalid_argument("LandmarkMap: invalid radius clamp");
  }
}

const Landmark* LandmarkMap::find(int id) const {
  auto it = landmarks_.find(id);
  return it == landmarks_.end() ? nullptr : &it->second;
}

const MomentAccumulator& LandmarkMap::marginal(int id) const {
  static const MomentAccumulator kEmpty;
  auto it = marginals_.find(id);
  return it == marginals_.end() ? kEmpty : it->second;
}

int LandmarkMap::insert(Landmark lm) {
  lm.id = next_id_++;
  const int id = lm.id;
  landmarks_.emplace(id, std::move(lm));
  return id;
}

void LandmarkMap::erase(int id) {
  landmarks_.erase(id);
  marginals_.erase(id);
}

void LandmarkMap::refresh_geometry(const StateLookup& state_of) {
  std::map<int, MotionState> cache;
  auto state = [&](int scan) -> const MotionState& {
    auto it = cache.find(scan);
    if (it == cache.end()) it = cache.emplace(scan, state_of(scan)).first;
    return it->second;
  };
  for (auto& [id, lm] : landmarks_) {
    lm.global_center = state(lm.creation_scan).transform * lm.center;
    MomentAccumulator m = marginal(id);
    for (const auto& [scan, pts] : lm.points_by_scan) {
      if (scan <= last_fixed_scan_) continue;
      const MotionState& s = state(scan);
      for (const auto& p : pts) m.add(s.transform * compensate_point_unchecked(p.position, p.timestamp, s));
    }
    lm.has_geometry = m.count >= 3;
    if (!lm.has_geometry) continue;
    const LandmarkCovariance c = covariance_from_moments(m);
    lm.fit_mean = c.mean;
    lm.fit_axis = lm.category == FeatureCategory::Plane ? c.eigenvectors.col(0) : c.eigenvectors.col(2);
  }
}

AssociationReport LandmarkMap::associate(std::span<const FeatureCluster> clusters,
                                         const MotionState& predicted, int scan_index) {
  AssociationReport report;
  const RigidTransform inv = predicted.transform.inverse();
  const double cell = params_.radius_max;

  struct Candidate {
    Landmark* lm;
    Vec3 projected;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(landmarks_.size());
  std::unordered_map<std::uint64_t, std::vector<int>> grid;
  for (auto& [id, lm] : landmarks_) {
    const Vec3 c = inv * lm.global_center;
    const auto [x, y, z] = cell_of(c, cell);
    grid[hash_cell(x, y, z)].push_back(static_cast<int>(candidates.size()));
    candidates.push_back({&lm, c});
  }

  const Mat3& rot = predicted.transform.rotation;
  std::vector<char> tracked(candidates.size(), 0);
  std::map<std::tuple<int, long, long, long, int>, std::vector<const FeaturePoint*>> untracked;
  std::map<int, FeatureCategory> cluster_category;

  for (const auto& cl : clusters) {
    cluster_category[cl.cluster_id] = cl.category;
    for (const auto& fp : cl.members) {
      const Vec3& p = fp.compensated_position;
      const Vec3 pw = predicted.transform * p;
      const auto [px, py, pz] = cell_of(p, cell);
      int best = -1;
      double best_d = 0.0;
      for (long dx = -1; dx <= 1; ++dx) {
        for (long dy = -1; dy <= 1; ++dy) {
          for (long dz = -1; dz <= 1; ++dz) {
            auto it = grid.find(hash_cell(px + dx, py + dy, pz + dz));
            if (it == grid.end()) continue;
            for (int ci : it->second) {
              const Candidate& cand = candidates[ci];
              const Landmark& lm = *cand.lm;
              if (lm.category != fp.category) continue;
              const double d = (p - cand.projected).norm();
              if (d > lm.radius) continue;
              if (best >= 0 && (d > best_d || (d == best_d && lm.id > candidates[best].lm->id))) continue;
              if (lm.has_geometry) {
                const Vec3 off = pw - lm.fit_mean;
                if (lm.category == FeatureCategory::Plane) {
                  if (params_.plane_gate > 0.0 && std::abs(lm.fit_axis.dot(off)) > params_.plane_gate) continue;
                  if (params_.normal_gate_cos > 0.0 && fp.has_normal &&
                      std::abs(lm.fit_axis.dot(rot * fp.normal)) < params_.normal_gate_cos) {
                    continue;
                  }
                } else if (params_.edge_gate > 0.0 &&
                           (off - lm.fit_axis.dot(off) * lm.fit_axis).norm() > params_.edge_gate) {
                  continue;
                }
              }
              best = ci;
              best_d = d;
            }
          }
        }
      }
      if (best >= 0) {
        Landmark& lm = *candidates[best].lm;
        lm.points_by_scan[scan_index].push_back({fp.raw_position, fp.timestamp});
        ++lm.total_points;
        tracked[best] = 1;
        ++report.tracked_points;
      } else {
        const auto [gx, gy, gz] = cell_of(p, params_.spawn_cell);
        untracked[{cl.cluster_id, gx, gy, gz, normal_bin(fp)}].push_back(&fp);
        ++report.untracked_points;
      }
    }
  }
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (tracked[i]) report.tracked.push_back(candidates[i].lm->id);
  }
  std::sort(report.tracked.begin(), report.tracked.end());

  for (const auto& [key, pts] : untracked) {
    if (static_cast<int>(pts.size()) < params_.min_spawn_points) continue;
    const FeatureCategory cat = cluster_category[std::get<0>(key)];
    if (!fit_acceptable(cat, pts, params_)) continue;
    FeatureCluster group;
    group.cluster_id = std::get<0>(key);
    group.category = cat;
    group.members.reserve(pts.size());
    for (const auto* p : pts) group.members.push_back(*p);
    if (auto lm = create_landmark(group, predicted, scan_index, params_)) {
      report.created.push_back(insert(std::move(*lm)));
    }
  }
  return report;
}

std::vector<int> LandmarkMap::update_observation_counts(const AssociationReport& report) {
  std::vector<int> deleted;
  for (auto it = landmarks_.begin(); it != landmarks_.end();) {
    const int id = it->first;
    Landmark& lm = it->second;
    if (std::binary_search(report.created.begin(), report.created.end(), id)) {
      ++it;
      continue;
    }
    if (std::binary_search(report.tracked.begin(), report.tracked.end(), id)) {
      ++lm.observation_count;
    } else {
      --lm.observation_count;
    }
    if (lm.observation_count <= 0) {
      deleted.push_back(id);
      marginals_.erase(id);
      it = landmarks_.erase(it);
    } else {
      ++it;
    }
  }
  return deleted;
}

bool LandmarkMap::check_center_drift(int id, const RigidTransform& creation_pose) {
  auto it = landmarks_.find(id);
  if (it == landmarks_.end()) return false;
  const Landmark& lm = it->second;
  const double drift = (creation_pose * lm.center - lm.initial_global_center).norm();
  if (drift > params_.drift_factor * lm.radius) {
    erase(id);
    return true;
  }
  return false;
}

std::vector<int> LandmarkMap::check_drift_in_window(const StateLookup& state_of) {
  std::vector<int> ids;
  for (const auto& [id, lm] : landmarks_) {
    if (lm.creation_scan > last_fixed_scan_) ids.push_back(id);
  }
  std::vector<int> deleted;
  for (int id : ids) {
    const int scan = landmarks_.at(id).creation_scan;
    if (check_center_drift(id, state_of(scan).transform)) deleted.push_back(id);
  }
  return deleted;
}

std::vector<int> LandmarkMap::prune_small_planes(int current_scan) {
  std::vector<int> deleted;
  for (auto it = landmarks_.begin(); it != landmarks_.end();) {
    const Landmark& lm = it->second;
    if (lm.category == FeatureCategory::Plane && current_scan - lm.creation_scan >= params_.min_plane_age &&
        lm.total_points < params_.min_plane_points) {
      deleted.push_back(it->first);
      marginals_.erase(it->first);
      it = landmarks_.erase(it);
    } else {
      ++it;
    }
  }
  return deleted;
}

void LandmarkMap::marginalize_scan(int scan_index, const MotionState& fixed_state) {
  if (scan_index <= last_fixed_scan_) {
    throw std::invalid_argument("marginalize_scan: scans must be marginalized in increasing order");
  }
  for (const auto& [id, lm] : landmarks_) {
    auto it = lm.points_by_scan.find(scan_index);
    if (it == lm.points_by_scan.end() || it->second.empty()) continue;
    MomentAccumulator& acc = marginals_[id];
    for (const auto& p : it->second) {
      acc.add(fixed_state.transform *
              compensate_point_unchecked(p.position, p.timestamp, fixed_state));
    }
  }
  last_fixed_scan_ = scan_index;
}

}  // namespace lmbao
