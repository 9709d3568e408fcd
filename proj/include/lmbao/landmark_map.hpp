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

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "lmbao/feature_extract.hpp"
#include "lmbao/geom.hpp"
#include "lmbao/moments.hpp"
#include "lmbao/motion_model.hpp"

namespace lmbao {

struct LandmarkParams {
  int obs_count_init = 4;
  double drift_factor = 3.0;
  long min_plane_points = 86;
  int min_plane_age = 5;
  double radius_min = 0.3;
  double radius_max = 3.0;

  // Extra association gates against the landmark's current fit, applied on
  // top of the radius test. Non-positive values disable a gate.
  double plane_gate = 0.1;       // max |n . (p - mean)|, meters
  double normal_gate_cos = 0.8;  // min |n_point . n_landmark|
  double edge_gate = 0.3;        // max distance to the fitted line, meters

  // Spawning: untracked points are grouped per (cluster, cell, normal axis).
  double spawn_cell = 2.0;
  int min_spawn_points = 5;
  double plane_fit_max = 0.05;  // sqrt(l1) limit for a new plane
  double edge_fit_max = 0.05;   // sqrt(l1 + l2) limit for a new edge
};

struct Landmark {
  int id = -1;
  FeatureCategory category = FeatureCategory::Plane;
  Vec3 center = Vec3::Zero();  // frame of the creation scan
  double radius = 0.3;
  Vec3 initial_global_center = Vec3::Zero();
  int observation_count = 0;
  std::map<int, std::vector<TimedPoint>> points_by_scan;  // raw positions
  int creation_scan = 0;
  long total_points = 0;

  // Derived from current state estimates by LandmarkMap::refresh_geometry.
  Vec3 global_center = Vec3::Zero();
  bool has_geometry = false;
  Vec3 fit_mean = Vec3::Zero();
  Vec3 fit_axis = Vec3::UnitZ();  // plane normal or edge direction
};

struct AssociationReport {
  std::vector<int> tracked;  // ascending ids that gained points this scan
  std::vector<int> created;  // ascending ids spawned this scan
  long tracked_points = 0;
  long untracked_points = 0;
};

/// Current state estimate of any processed scan (window or fixed).
using StateLookup = std::function<MotionState(int scan_index)>;

/// center = centroid of compensated members, radius = max member distance
/// clamped to [radius_min, radius_max], initial_global_center = predicted
/// transform applied to center, observation_count = obs_count_init.
/// Returns nullopt for an empty cluster or one whose points all coincide.
std::optional<Landmark> create_landmark(const FeatureCluster& cluster,
                                        const MotionState& predicted, int scan_index,
                                        const LandmarkParams& params);

class LandmarkMap {
 public:
  explicit LandmarkMap(LandmarkParams params = {});

  const LandmarkParams& params() const { return params_; }
  const std::map<int, Landmark>& landmarks() const { return landmarks_; }
  size_t size() const { return landmarks_.size(); }
  int next_id() const { return next_id_; }
  int last_fixed_scan() const { return last_fixed_scan_; }

  const Landmark* find(int id) const;
  const MomentAccumulator& marginal(int id) const;

  /// Assigns the next id and stores the landmark; returns the id.
  int insert(Landmark lm);
  void erase(int id);

  /// Recomputes global centers and line/plane fits from current states.
  void refresh_geometry(const StateLookup& state_of);

  /// Joins each feature point to the nearest eligible landmark of the same
  /// category (projected center within radius, then the fit gates); ties go
  /// to the lower id. Untracked points spawn new landmarks.
  AssociationReport associate(std::span<const FeatureCluster> clusters,
                              const MotionState& predicted, int scan_index);

  /// +1 for tracked, -1 for every other pre-existing landmark; landmarks
  /// reaching 0 are erased. Landmarks created this scan are left at init.
  std::vector<int> update_observation_counts(const AssociationReport& report);

  /// True (and erased) iff |creation_pose * center - initial| > factor * r.
  bool check_center_drift(int id, const RigidTransform& creation_pose);

  /// Drift check for every landmark whose creation scan is not yet fixed.
  std::vector<int> check_drift_in_window(const StateLookup& state_of);

  /// Erases planes with age >= min_plane_age and total_points < min_plane_points.
  std::vector<int> prune_small_planes(int current_scan);

  /// Folds the scan's points, projected with its fixed state, into the
  /// marginal accumulators. Scans must be marginalized in increasing order.
  void marginalize_scan(int scan_index, const MotionState& fixed_state);

 private:
  LandmarkParams params_;
  std::map<int, Landmark> landmarks_;
  std::map<int, MomentAccumulator> marginals_;
  int next_id_ = 0;
  int last_fixed_scan_ = -1;
};

}  // namespace lmbao
