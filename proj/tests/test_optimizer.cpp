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
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lmbao/optimizer.hpp"
#include "lmbao/window.hpp"
#include "scenario.hpp"

namespace lmbao {
namespace {

bool same_state(const MotionState& a, const MotionState& b) {
  return a.transform.rotation == b.transform.rotation &&
         a.transform.translation == b.transform.translation &&
         a.linear_velocity == b.linear_velocity && a.angular_velocity == b.angular_velocity &&
         a.start_time == b.start_time;
}

double state_distance(const MotionState& a, const MotionState& b) {
  return std::max({(a.transform.translation - b.transform.translation).norm(),
                   log_so3(a.transform.rotation.transpose() * b.transform.rotation).norm(),
                   (a.linear_velocity - b.linear_velocity).norm(),
                   (a.angular_velocity - b.angular_velocity).norm()});
}

void fill_window(testing::Scenario& sc, int first, int last) {
  for (int k = first; k <= last; ++k) sc.window.push(k, sc.truth[k]);
}

TEST(SlidingWindow, CapacityAndOrdering) {
  EXPECT_THROW(SlidingWindow(1), std::invalid_argument);
  SlidingWindow w(3);
  EXPECT_TRUE(w.empty());
  EXPECT_THROW(w.pop_oldest(), std::logic_error);
  w.push(0, MotionState::at_rest(0.0));
  EXPECT_THROW(w.push(0, MotionState::at_rest(0.0)), std::invalid_argument);
  w.push(2, MotionState::at_rest(0.2));
  w.push(3, MotionState::at_rest(0.3));
  EXPECT_TRUE(w.full());
  EXPECT_THROW(w.push(4, MotionState::at_rest(0.4)), std::logic_error);
  EXPECT_EQ(w.last_fixed(), nullptr);
  const WindowEntry e = w.pop_oldest();
  EXPECT_EQ(e.scan_index, 0);
  ASSERT_NE(w.last_fixed(), nullptr);
  EXPECT_EQ(w.last_fixed()->scan_index, 0);
  EXPECT_EQ(w.size(), 2u);
  EXPECT_TRUE(w.state_of(0).has_value());
  EXPECT_TRUE(w.state_of(3).has_value());
  EXPECT_FALSE(w.state_of(1).has_value());
  EXPECT_THROW(w.set_states({MotionState::at_rest(0.2)}), std::invalid_argument);
}

TEST(SlidingWindow, MarginalizeFixesStateAndFoldsPoints) {
  std::mt19937_64 rng(1);
  auto sc = testing::make_ba_scenario(rng, 4, 2, 1, 10);
  fill_window(sc, 0, 3);
  const WindowEntry e = marginalize_scan(sc.map, sc.window);
  EXPECT_EQ(e.scan_index, 0);
  EXPECT_TRUE(same_state(sc.window.fixed().at(0), sc.truth[0]));
  EXPECT_EQ(sc.map.last_fixed_scan(), 0);
  for (const auto& [id, lm] : sc.map.landmarks()) {
    const auto& m = sc.map.marginal(id);
    EXPECT_EQ(m.count, 10);
    MomentAccumulator oracle;
    for (const auto& p : lm.points_by_scan.at(0)) oracle.add(world_point(sc.truth[0], p));
    EXPECT_LT((m.second_moment - oracle.second_moment).norm(), 1e-12);
  }
}

TEST(WindowCost, MarginalFormEqualsFullObjective) {
  std::mt19937_64 rng(2);
  auto sc = testing::make_ba_scenario(rng, 6, 3, 2, 12, 0.02);
  fill_window(sc, 0, 3);
  marginalize_scan(sc.map, sc.window);
  sc.window.push(4, sc.truth[4]);
  marginalize_scan(sc.map, sc.window);
  sc.window.push(5, sc.truth[5]);
  // Perturb the window so that costs are not trivially zero.
  std::vector<MotionState> states;
  for (const auto& e : sc.window.entries()) states.push_back(retract(e.state, 0.01 * Vec12::Random()));
  sc.window.set_states(states);

  const LmConfig config;
  const auto problems = build_problems(sc.map, sc.window);
  const double marginal_form =
      window_cost(problems, states, &sc.window.last_fixed()->state, config);

  // Full objective: every point of every scan projected with its own state,
  // plus continuity terms touching at least one free state.
  auto state_of = [&](int k) { return *sc.window.state_of(k); };
  double full = 0.0;
  for (const auto& [id, lm] : sc.map.landmarks()) {
    MomentAccumulator m;
    for (const auto& [k, pts] : lm.points_by_scan) {
      for (const auto& p : pts) m.add(world_point(state_of(k), p));
    }
    const auto c = covariance_from_moments(m);
    const double eps = lm.category == FeatureCategory::Plane ? plane_residual(c) : edge_residual(c);
    full += huber(static_cast<double>(m.count) * eps * eps);
  }
  for (int k = 2; k <= 5; ++k) {
    full += continuity_residual(state_of(k - 1), state_of(k), config.weights).squaredNorm();
  }
  EXPECT_NEAR(marginal_form, full, 1e-9 * std::max(1.0, full));
}

TEST(OptimizeWindow, RequiresTwoStates) {
  std::mt19937_64 rng(3);
  auto sc = testing::make_ba_scenario(rng, 2, 1, 0, 10);
  sc.window.push(0, sc.truth[0]);
  EXPECT_THROW(optimize_window(sc.map, sc.window, LmConfig{}), std::invalid_argument);
}

TEST(OptimizeWindow, ConsistentInputIsAFixedPoint) {
  std::mt19937_64 rng(4);
  auto sc = testing::make_ba_scenario(rng, 4, 4, 2, 20);
  fill_window(sc, 0, 3);
  const auto r = optimize_window(sc.map, sc.window, LmConfig{});
  ASSERT_EQ(r.states.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_LT(state_distance(r.states[k], sc.truth[k]), 1e-8);
  EXPECT_LE(r.iterations, 2);
}

TEST(OptimizeWindow, RecoversPerturbedPoseOnSinglePlane) {
  std::mt19937_64 rng(5);
  auto sc = testing::make_ba_scenario(rng, 4, 1, 0, 40);
  fill_window(sc, 0, 3);
  // Only the normal component is observable from a single plane.
  const Vec3 normal = sc.features[0].frame.col(2);
  std::vector<MotionState> states = sc.truth;
  states[2].transform.translation += 0.2 * normal;
  sc.window.set_states(states);
  const auto r = optimize_window(sc.map, sc.window, LmConfig{});
  const Vec3 err = r.states[2].transform.translation - sc.truth[2].transform.translation;
  EXPECT_LT(std::abs(normal.dot(err)), 1e-3);
  const auto problems = build_problems(sc.map, sc.window);
  const auto& lm = sc.map.landmarks().begin()->second;
  ASSERT_EQ(lm.category, FeatureCategory::Plane);
  EXPECT_LT(landmark_residual(ResidualKind::Plane, sc.map.marginal(lm.id), problems[0].observations,
                              r.states),
            1e-4);
}

TEST(OptimizeWindow, RecoversPerturbedPoseAmongManyFeatures) {
  std::mt19937_64 rng(15);
  auto sc = testing::make_ba_scenario(rng, 4, 6, 3, 40);
  fill_window(sc, 0, 3);
  std::vector<MotionState> states = sc.truth;
  states[2].transform.translation += Vec3(0.1, -0.05, 0.08);
  states[2].transform.rotation = states[2].transform.rotation * exp_so3(Vec3(0.01, -0.02, 0.015));
  sc.window.set_states(states);
  const auto r = optimize_window(sc.map, sc.window, LmConfig{});
  EXPECT_LT((r.states[2].transform.translation - sc.truth[2].transform.translation).norm(), 1e-3);
  EXPECT_LT(log_so3(r.states[2].transform.rotation * sc.truth[2].transform.rotation.transpose()).norm(),
            1e-4);
}

TEST(OptimizeWindow, AcceptedCostsNeverIncrease) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    auto sc = testing::make_ba_scenario(rng, 4, 4, 2, 20, 0.02);
    fill_window(sc, 0, 3);
    std::vector<MotionState> states;
    for (const auto& s : sc.truth) states.push_back(retract(s, 0.05 * Vec12::Random()));
    sc.window.set_states(states);
    const auto r = optimize_window(sc.map, sc.window, LmConfig{});
    ASSERT_FALSE(r.cost_trace.empty());
    for (size_t i = 1; i < r.cost_trace.size(); ++i) EXPECT_LE(r.cost_trace[i], r.cost_trace[i - 1]);
  }
}

TEST(OptimizeWindow, LeavesFixedStatesAndMarginalsUntouched) {
  std::mt19937_64 rng(7);
  auto sc = testing::make_ba_scenario(rng, 6, 3, 2, 15, 0.01);
  fill_window(sc, 0, 3);
  marginalize_scan(sc.map, sc.window);
  sc.window.push(4, retract(sc.truth[4], 0.05 * Vec12::Random()));
  marginalize_scan(sc.map, sc.window);
  sc.window.push(5, retract(sc.truth[5], 0.05 * Vec12::Random()));
  const auto fixed_before = sc.window.fixed();
  std::map<int, MomentAccumulator> marg_before;
  for (const auto& [id, lm] : sc.map.landmarks()) marg_before[id] = sc.map.marginal(id);

  const auto r = optimize_window(sc.map, sc.window, LmConfig{});
  EXPECT_GT(r.iterations, 0);
  ASSERT_EQ(sc.window.fixed().size(), fixed_before.size());
  for (const auto& [k, s] : fixed_before) EXPECT_TRUE(same_state(s, sc.window.fixed().at(k)));
  for (const auto& [id, m] : marg_before) EXPECT_EQ(sc.map.marginal(id), m);
}

TEST(OptimizeWindow, SerialAndParallelAgreeBitwise) {
  std::mt19937_64 rng(8);
  auto sc = testing::make_ba_scenario(rng, 4, 5, 3, 25, 0.02);
  fill_window(sc, 0, 3);
  std::vector<MotionState> states;
  for (const auto& s : sc.truth) states.push_back(retract(s, 0.03 * Vec12::Random()));
  sc.window.set_states(states);
  LmConfig serial;
  serial.parallel = false;
  LmConfig parallel;
  parallel.parallel = true;
  const auto a = optimize_window(sc.map, sc.window, serial);
  const auto b = optimize_window(sc.map, sc.window, parallel);
  ASSERT_EQ(a.cost_trace, b.cost_trace);
  for (size_t k = 0; k < a.states.size(); ++k) EXPECT_TRUE(same_state(a.states[k], b.states[k]));
}

}  // namespace
}  // namespace lmbao
