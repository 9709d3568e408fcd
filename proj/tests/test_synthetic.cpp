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
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "lmbao/synthetic.hpp"
#include "test_support.hpp"

namespace lmbao {
namespace {

// Distance from a world point to the nearest surface of the world.
double distance_to_world(const SyntheticWorld& w, const Vec3& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : w.planes) {
    const Vec3 d = x - p.center;
    const double u = d.dot(p.axis_u);
    const double v = d.dot(p.axis_v());
    if (std::abs(u) > p.half_u + 1e-6 || std::abs(v) > p.half_v + 1e-6) continue;
    best = std::min(best, std::abs(d.dot(p.normal)));
  }
  for (const auto& e : w.edges) {
    const Vec3 d = x - e.center;
    const double s = std::clamp(d.dot(e.direction), -e.half_length, e.half_length);
    best = std::min(best, (d - s * e.direction).norm());
  }
  return best;
}

SyntheticWorld ground_plane_world() {
  SyntheticWorld w;
  PlanePatch g;
  g.center = Vec3(0, 0, -1);
  g.normal = Vec3::UnitZ();
  g.half_u = 1e4;
  g.half_v = 1e4;
  w.planes.push_back(g);
  w.seed = 5;
  return w;
}

BeamModel downward_beam() {
  BeamModel b;
  b.columns = 360;
  b.rings = 16;
  b.elev_min_deg = -60.0;
  b.elev_max_deg = -10.0;
  return b;
}

TEST(GenerateWorld, DeterministicForFixedSeed) {
  WorldConfig c;
  c.num_planes = 10;
  c.num_edges = 5;
  const auto a = generate_world(c, 1);
  const auto b = generate_world(c, 1);
  ASSERT_EQ(a.planes.size(), b.planes.size());
  ASSERT_EQ(a.edges.size(), b.edges.size());
  for (size_t i = 0; i < a.planes.size(); ++i) {
    EXPECT_EQ(a.planes[i].center, b.planes[i].center);
    EXPECT_EQ(a.planes[i].normal, b.planes[i].normal);
  }
  for (size_t i = 0; i < a.edges.size(); ++i) EXPECT_EQ(a.edges[i].center, b.edges[i].center);
}

TEST(GenerateWorld, EmptyAndCounts) {
  WorldConfig c;
  const auto empty = generate_world(c, 3);
  EXPECT_TRUE(empty.planes.empty());
  EXPECT_TRUE(empty.edges.empty());
  c.num_planes = 10;
  const auto w = generate_world(c, 3);
  ASSERT_EQ(w.planes.size(), 10u);
  for (const auto& p : w.planes) {
    EXPECT_TRUE((p.center.array() >= c.bounds_min.array()).all());
    EXPECT_TRUE((p.center.array() <= c.bounds_max.array()).all());
    EXPECT_NEAR(p.normal.norm(), 1.0, 1e-12);
    EXPECT_NEAR(p.axis_u.dot(p.normal), 0.0, 1e-12);
  }
  c.num_planes = -1;
  EXPECT_THROW(generate_world(c, 3), std::invalid_argument);
}

TEST(GenerateWorld, StructuredLayoutsHaveUnitDirections) {
  for (const auto& c : {testing::corridor_world(), testing::loop_world()}) {
    const auto w = generate_world(c, 2);
    EXPECT_FALSE(w.planes.empty());
    EXPECT_EQ(static_cast<int>(w.edges.size()), c.num_edges);
    for (const auto& p : w.planes) EXPECT_NEAR(p.normal.norm(), 1.0, 1e-12);
    for (const auto& e : w.edges) EXPECT_NEAR(e.direction.norm(), 1.0, 1e-12);
  }
}

TEST(SimulateScan, StationaryDownwardBeamOnPlane) {
  const auto w = ground_plane_world();
  const Scan s = simulate_scan(w, Trajectory::stationary(RigidTransform::identity()).function(), 0.0,
                               0.1, downward_beam());
  ASSERT_EQ(s.points.size(), 360u * 16u);
  for (const auto& p : s.points) EXPECT_NEAR(p.position.z(), -1.0, 1e-9);
  EXPECT_DOUBLE_EQ(s.start_time, s.points.front().timestamp);
  for (size_t i = 1; i < s.points.size(); ++i) {
    EXPECT_GE(s.points[i].timestamp, s.points[i - 1].timestamp);
  }
}

TEST(SimulateScan, NoHitsThrows) {
  SyntheticWorld w;
  EXPECT_THROW(simulate_scan(w, Trajectory::stationary(RigidTransform::identity()).function(), 0.0,
                             0.1, downward_beam()),
               std::runtime_error);
}

TEST(SimulateScan, CompensationRecoversSurfaces) {
  WorldConfig c = testing::corridor_world();
  const auto w = generate_world(c, 4);
  BeamModel b;
  b.columns = 600;
  b.rings = 32;
  RigidTransform start;
  start.translation = Vec3(0.0, 0.2, 0.0);
  const auto traj = Trajectory::constant_twist(start, Vec3(2.0, 0.1, 0.0), Vec3(0.0, 0.05, 0.3));
  const Scan s = simulate_scan(w, traj.function(), 0.4, 0.1, b);
  const MotionState state = traj.state_at(s.start_time);
  double worst = 0.0;
  for (const auto& p : s.points) {
    const Vec3 x = to_world(state, compensate_point(p.position, p.timestamp, state));
    worst = std::max(worst, distance_to_world(w, x));
  }
  EXPECT_LT(worst, 1e-9);
  EXPECT_GT(s.points.size(), 1000u);
}

TEST(SimulateScan, IdentityMotionCompensationIsBitIdentical) {
  const auto w = generate_world(testing::corridor_world(), 1);
  BeamModel b;
  b.columns = 300;
  b.rings = 16;
  const Scan s = simulate_scan(w, Trajectory::stationary(RigidTransform::identity()).function(), 0.0,
                               0.1, b);
  const MotionState rest = MotionState::at_rest(s.start_time);
  for (const auto& p : s.points) {
    const Vec3 c = compensate_point(p.position, p.timestamp, rest);
    EXPECT_EQ(c, p.position);
  }
}

TEST(SimulateScan, RangeNoiseHasConfiguredSpread) {
  const auto w = ground_plane_world();
  BeamModel b = downward_beam();
  b.columns = 1000;
  b.noise_sigma = 0.01;
  const Scan s = simulate_scan(w, Trajectory::stationary(RigidTransform::identity()).function(), 0.0,
                               0.1, b);
  ASSERT_GE(s.points.size(), 10000u);
  double sum = 0.0, sum2 = 0.0;
  for (const auto& p : s.points) {
    // Along-ray residual against the exact intersection with z = -1.
    const Vec3 dir = p.position.normalized();
    const double err = p.position.norm() - (-1.0 / dir.z());
    sum += err;
    sum2 += err * err;
  }
  const double n = static_cast<double>(s.points.size());
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  EXPECT_GE(sd, 0.008);
  EXPECT_LE(sd, 0.012);
}

TEST(Trajectory, ConstantTwistStateMatchesPoseFunction) {
  RigidTransform start;
  start.rotation = exp_so3(Vec3(0, 0, 0.3));
  const Vec3 v(1.0, 0.2, 0.0), om(0.0, 0.0, 0.4);
  const auto traj = Trajectory::constant_twist(start, v, om);
  const MotionState s = traj.state_at(0.7);
  const MotionState p = predict_next_state(s, 0.95);
  const RigidTransform truth = traj.pose(0.95);
  EXPECT_LT((p.transform.rotation - truth.rotation).norm(), 1e-12);
  EXPECT_LT((p.transform.translation - truth.translation).norm(), 1e-12);
}

TEST(Trajectory, SquareLoopClosesAndHasExpectedLength) {
  const double side = 8.0, radius = 2.0, speed = 2.0;
  const auto traj = Trajectory::square_loop(side, radius, speed);
  const double perimeter = 4.0 * side + 2.0 * std::numbers::pi * radius;
  const double period = perimeter / speed;
  EXPECT_LT((traj.pose(period).translation - traj.pose(0.0).translation).norm(), 1e-9);
  EXPECT_NEAR(traj.path_length(0.0, period, 20000), perimeter, 1e-3);
  const MotionState s = traj.state_at(1.0);
  EXPECT_NEAR(s.linear_velocity.x(), speed, 1e-6);
}

TEST(SimulateRun, GroundTruthStartsAtIdentity) {
  const auto w = generate_world(testing::corridor_world(), 1);
  BeamModel b;
  b.columns = 200;
  b.rings = 16;
  RigidTransform start;
  start.translation = Vec3(3, 0.1, 0.2);
  const auto run = simulate_run(w, Trajectory::constant_twist(start, Vec3(1.5, 0, 0), Vec3::Zero()),
                                b, 3);
  ASSERT_EQ(run.scans.size(), 3u);
  EXPECT_LT(run.ground_truth[0].pose.translation.norm(), 1e-12);
  EXPECT_NEAR(run.ground_truth[2].pose.translation.x(), 0.3, 1e-12);
  EXPECT_EQ(run.scans[1].index, 1);
}

}  // namespace
}  // namespace lmbao
