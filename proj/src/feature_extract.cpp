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
#include "lmbao/feature_extract.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "lmbao/kernels.hpp"

namespace lmbao {

namespace {

constexpr double kColumnTolerance = 0.05;

enum class Candidate : std::uint8_t { None, Plane, Edge };

std::int64_t voxel_key(const Vec3& p, double size) {
  const auto q = [size](double v) {
    return static_cast<std::int64_t>(std::floor(v / size)) & 0x1FFFFF;
  };
  return (q(p.x()) << 42) | (q(p.y()) << 21) | q(p.z());
}

}  // namespace

const char* to_string(FeatureCategory c) {
  return c == FeatureCategory::Plane ? "plane" : "edge";
}

int ring_of(const Vec3& raw, const ProjectionParams& params) {
  if (params.rings <= 1) return 0;
  const double elev = std::atan2(raw.z(), std::hypot(raw.x(), raw.y())) * 180.0 / std::numbers::pi;
  const double step = (params.elev_max_deg - params.elev_min_deg) / (params.rings - 1);
  const long row = std::lround((elev - params.elev_min_deg) / step);
  if (row < 0 || row >= params.rings) return -1;
  return static_cast<int>(row);
}

SphericalImage project_spherical(const Scan& scan, const MotionState& state,
                                 const ProjectionParams& params) {
  SphericalImage img;
  img.width = params.columns;
  img.height = params.rings;
  img.cells.assign(static_cast<size_t>(img.width) * img.height, SphericalCell{});

  double cached_time = std::numeric_limits<double>::quiet_NaN();
  Mat3 rot = Mat3::Identity();
  for (size_t i = 0; i < scan.points.size(); ++i) {
    const auto& pt = scan.points[i];
    const double dt = pt.timestamp - state.start_time;
    if (pt.timestamp != cached_time) {
      rot = exp_so3(dt * state.angular_velocity);
      cached_time = pt.timestamp;
    }
    const Vec3 comp = rot * pt.position + dt * state.linear_velocity;
    const int row = ring_of(pt.position, params);
    if (row < 0) continue;
    // The tolerance absorbs timestamp quantization in stored scans (1e-6 s is
    // about 0.02 columns at the default rate).
    long col = static_cast<long>(std::floor(params.alpha * dt + kColumnTolerance));
    col = std::clamp<long>(col, 0, img.width - 1);
    const double r = comp.norm();
    auto& cell = img.at(row, static_cast<int>(col));
    if (cell.occupied() && cell.range <= r) continue;
    cell.point_index = static_cast<int>(i);
    cell.range = r;
    cell.position = comp;
    cell.raw = pt.position;
    cell.timestamp = pt.timestamp;
  }
  return img;
}

std::vector<double> smoothness_scores(const SphericalImage& img, int window) {
  std::vector<double> scores;
  kernels::smoothness_omp(img, window, scores);
  return scores;
}

std::vector<FeatureCluster> classify_and_cluster(const SphericalImage& img,
                                                 std::span<const double> scores,
                                                 const ClassifyParams& params) {
  if (!(params.edge_threshold > params.plane_threshold)) {
    throw std::invalid_argument("classify_and_cluster: edge_threshold must exceed plane_threshold");
  }
  const int w = img.width;
  const int h = img.height;
  std::vector<Candidate> cand(img.cells.size(), Candidate::None);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const size_t i = static_cast<size_t>(r) * w + c;
      const double s = scores[i];
      if (std::isnan(s)) continue;
      if (s < params.plane_threshold) {
        cand[i] = Candidate::Plane;
      } else if (s > params.edge_threshold) {
        if (params.edge_peak_only) {
          const double left = c > 0 ? scores[i - 1] : -1.0;
          const double right = c + 1 < w ? scores[i + 1] : -1.0;
          if ((!std::isnan(left) && left >= s) || (!std::isnan(right) && right > s)) continue;
        }
        cand[i] = Candidate::Edge;
      }
    }
  }

  std::vector<int> label(img.cells.size(), -1);
  std::vector<FeatureCluster> clusters;
  std::deque<int> queue;
  std::vector<int> members;
  int provisional = 0;
  for (size_t seed = 0; seed < cand.size(); ++seed) {
    if (cand[seed] == Candidate::None || label[seed] != -1) continue;
    const Candidate kind = cand[seed];
    members.clear();
    queue.clear();
    queue.push_back(static_cast<int>(seed));
    label[seed] = provisional;
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      members.push_back(cur);
      const int r = cur / w;
      const int c = cur % w;
      const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
      for (const auto& n : nbr) {
        if (n[0] < 0 || n[0] >= h || n[1] < 0 || n[1] >= w) continue;
        const int j = n[0] * w + n[1];
        if (label[j] != -1 || cand[j] != kind) continue;
        if (std::abs(img.cells[j].range - img.cells[cur].range) >= params.depth_gap) continue;
        label[j] = provisional;
        queue.push_back(j);
      }
    }
    ++provisional;
    if (static_cast<int>(members.size()) < params.min_cluster) continue;

    FeatureCluster cl;
    cl.cluster_id = static_cast<int>(clusters.size());
    cl.category = kind == Candidate::Plane ? FeatureCategory::Plane : FeatureCategory::Edge;
    cl.members.reserve(members.size());
    Vec3 sum = Vec3::Zero();
    for (int idx : members) {
      const auto& cell = img.cells[idx];
      FeaturePoint fp;
      fp.raw_position = cell.raw;
      fp.compensated_position = cell.position;
      fp.timestamp = cell.timestamp;
      fp.cluster_id = cl.cluster_id;
      fp.category = cl.category;
      fp.row = idx / w;
      fp.col = idx % w;
      sum += cell.position;
      cl.members.push_back(fp);
    }
    cl.centroid = sum / static_cast<double>(cl.members.size());
    clusters.push_back(std::move(cl));
  }
  return clusters;
}

std::vector<FeatureCluster> downsample_clusters(const std::vector<FeatureCluster>& clusters,
                                                double plane_voxel, double edge_voxel) {
  std::vector<FeatureCluster> out;
  out.reserve(clusters.size());
  std::unordered_map<std::int64_t, int> slot_of;
  std::vector<std::vector<int>> voxels;
  for (const auto& cl : clusters) {
    const double size = cl.category == FeatureCategory::Plane ? plane_voxel : edge_voxel;
    if (!(size > 0.0)) {
      out.push_back(cl);
      continue;
    }
    slot_of.clear();
    voxels.clear();
    for (int i = 0; i < static_cast<int>(cl.members.size()); ++i) {
      const auto key = voxel_key(cl.members[i].compensated_position, size);
      auto [it, inserted] = slot_of.try_emplace(key, static_cast<int>(voxels.size()));
      if (inserted) voxels.emplace_back();
      voxels[it->second].push_back(i);
    }

    FeatureCluster ds;
    ds.cluster_id = cl.cluster_id;
    ds.category = cl.category;
    Vec3 sum = Vec3::Zero();
    for (const auto& vox : voxels) {
      Vec3 mean = Vec3::Zero();
      for (int i : vox) mean += cl.members[i].compensated_position;
      mean /= static_cast<double>(vox.size());
      int best = vox.front();
      double best_d = std::numeric_limits<double>::infinity();
      for (int i : vox) {
        const double d = (cl.members[i].compensated_position - mean).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      const FeaturePoint& fp = cl.members[best];
      sum += fp.compensated_position;
      ds.members.push_back(fp);
    }
    if (ds.members.empty()) continue;
    ds.centroid = sum / static_cast<double>(ds.members.size());
    out.push_back(std::move(ds));
  }
  return out;
}

void estimate_plane_normals(const SphericalImage& img, std::vector<FeatureCluster>& clusters,
                            const NormalParams& params) {
  std::vector<Vec3> patch;
  for (auto& cl : clusters) {
    if (cl.category != FeatureCategory::Plane) continue;
    std::vector<FeaturePoint> kept;
    kept.reserve(cl.members.size());
    for (auto& fp : cl.members) {
      const SphericalCell& center = img.at(fp.row, fp.col);
      patch.clear();
      for (int r = std::max(0, fp.row - params.half_rows); r <= std::min(img.height - 1, fp.row + params.half_rows); ++r) {
        for (int c = std::max(0, fp.col - params.half_cols); c <= std::min(img.width - 1, fp.col + params.half_cols); ++c) {
          const SphericalCell& n = img.at(r, c);
          if (n.occupied() && std::abs(n.range - center.range) < params.depth_gap) patch.push_back(n.position);
        }
      }
      fp.has_normal = false;
      if (static_cast<int>(patch.size()) >= params.min_points) {
        Vec3 mean = Vec3::Zero();
        for (const auto& q : patch) mean += q;
        mean /= static_cast<double>(patch.size());
        Mat3 cov = Mat3::Zero();
        for (const auto& q : patch) cov += (q - mean) * (q - mean).transpose();
        Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
        if (es.eigenvalues()[0] < params.planarity * es.eigenvalues()[1]) {
          fp.normal = es.eigenvectors().col(0);
          fp.has_normal = true;
        }
      }
      if (fp.has_normal || !params.require_normal) kept.push_back(fp);
    }
    cl.members = std::move(kept);
    if (cl.members.empty()) continue;
    Vec3 sum = Vec3::Zero();
    for (const auto& m : cl.members) sum += m.compensated_position;
    cl.centroid = sum / static_cast<double>(cl.members.size());
  }
  std::erase_if(clusters, [](const FeatureCluster& c) { return c.members.empty(); });
}

std::vector<FeatureCluster> extract_features(const Scan& scan, const MotionState& state,
                                             const FeatureParams& params) {
  const SphericalImage img = project_spherical(scan, state, params.projection);
  const std::vector<double> scores = smoothness_scores(img, params.classify.window);
  const auto clusters = classify_and_cluster(img, scores, params.classify);
  auto out = downsample_clusters(clusters, params.plane_voxel, params.edge_voxel);
  estimate_plane_normals(img, out, params.normals);
  return out;
}

}  // namespace lmbao
