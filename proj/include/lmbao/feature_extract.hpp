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

#include "lmbao/geom.hpp"
#include "lmbao/motion_model.hpp"
#include "lmbao/scan_io.hpp"

namespace lmbao {

enum class FeatureCategory { Plane, Edge };

const char* to_string(FeatureCategory c);

/// Raster geometry of the range image. Columns come from acquisition time
/// (u = alpha * (t_i - t_k)); rows are the laser ring recovered from the raw
/// elevation angle.
struct ProjectionParams {
  double alpha = 18000.0;  // columns per second
  int columns = 1800;
  int rings = 64;
  double elev_min_deg = -25.0;
  double elev_max_deg = 15.0;
};

struct SphericalCell {
  int point_index = -1;
  double range = 0.0;
  Vec3 position = Vec3::Zero();  // compensated, scan frame
  Vec3 raw = Vec3::Zero();
  double timestamp = 0.0;

  bool occupied() const { return point_index >= 0; }
};

struct SphericalImage {
  int width = 0;
  int height = 0;
  std::vector<SphericalCell> cells;  // row-major

  SphericalCell& at(int row, int col) { return cells[static_cast<size_t>(row) * width + col]; }
  const SphericalCell& at(int row, int col) const {
    return cells[static_cast<size_t>(row) * width + col];
  }
};

/// Compensates every point with `state` and rasterizes it. Column is
/// floor(alpha * (t_i - t_k)) clamped to [0, width); a collision keeps the
/// nearer point. Points whose ring falls outside [0, rings) are dropped.
SphericalImage project_spherical(const Scan& scan, const MotionState& state,
                                 const ProjectionParams& params);

/// Ring index of a raw sensor-frame point, or -1 outside the vertical FOV.
int ring_of(const Vec3& raw, const ProjectionParams& params);

/// Range-normalised curvature over same-row neighbours:
///   c(i) = |sum_j (r_j - r_i)| / (|N(i)| * r_i),  |N(i)| = 2 * window.
/// Cells without a full, occupied neighbourhood get NaN (no score).
std::vector<double> smoothness_scores(const SphericalImage& img, int window);

struct FeaturePoint {
  Vec3 raw_position = Vec3::Zero();
  Vec3 compensated_position = Vec3::Zero();
  double timestamp = 0.0;
  int cluster_id = -1;
  FeatureCategory category = FeatureCategory::Plane;
  int row = 0;
  int col = 0;
  // Local surface normal (scan frame) from the image neighborhood, if planar.
  Vec3 normal = Vec3::Zero();
  bool has_normal = false;
};

struct FeatureCluster {
  int cluster_id = 0;
  FeatureCategory category = FeatureCategory::Plane;
  std::vector<FeaturePoint> members;
  Vec3 centroid = Vec3::Zero();
};

struct ClassifyParams {
  double plane_threshold = 0.05;
  double edge_threshold = 0.5;
  int window = 5;
  double depth_gap = 0.3;
  int min_cluster = 5;
  // Keep an edge candidate only where its score peaks along the row, so a
  // depth discontinuity yields a one-cell-wide line instead of a band.
  bool edge_peak_only = true;
};

/// Thresholds scores into plane/edge candidates and grows 4-connected
/// clusters (same category, range gap < depth_gap) by BFS. Seeds are visited
/// in row-major order; ids are dense from 0.
std::vector<FeatureCluster> classify_and_cluster(const SphericalImage& img,
                                                 std::span<const double> scores,
                                                 const ClassifyParams& params);

/// Keeps one member per voxel of each cluster (the one nearest the voxel
/// centroid). Clusters left empty are dropped; ids are preserved.
std::vector<FeatureCluster> downsample_clusters(const std::vector<FeatureCluster>& clusters,
                                                double plane_voxel, double edge_voxel);

struct NormalParams {
  int half_rows = 1;
  int half_cols = 3;
  double depth_gap = 0.3;
  int min_points = 6;
  double planarity = 0.1;  // accept when l1 < planarity * l2
  // Drop plane points whose neighborhood is not planar (corners, seams).
  bool require_normal = true;
};

/// PCA normal of each plane member's image neighborhood (compensated points
/// within depth_gap of the member's range). Recomputes centroids and drops
/// clusters left empty.
void estimate_plane_normals(const SphericalImage& img, std::vector<FeatureCluster>& clusters,
                            const NormalParams& params);

struct FeatureParams {
  ProjectionParams projection;
  ClassifyParams classify;
  NormalParams normals;
  double plane_voxel = 0.4;
  double edge_voxel = 0.2;
};

/// project -> score -> classify/cluster -> downsample -> plane normals.
std::vector<FeatureCluster> extract_features(const Scan& scan, const MotionState& state,
                                             const FeatureParams& params);

}  // namespace lmbao
