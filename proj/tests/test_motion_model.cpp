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
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "lmbao/motion_model.hpp"
#include "test_support.hpp"

namespace lmbao {
namespace {

TEST(CompensatePoint, Examples) {
  MotionState s = MotionState::at_rest(1.0);
  const Vec3 p(1, 2, 3);
  EXPECT_EQ(compensate_point(p, 1.3, s), p);
  s.linear_velocity = Vec3(0.5, 0.1, 0);
  s.angular_velocity = Vec3(0.1, 0, 0.3);
  EXPECT_EQ(compensate_point(p, 1.0, s), p);
  s.angular_velocity.setZero();
  s.linear_velocity = Vec3(1, 0, 0);
  EXPECT_LT((compensate_point(p, 1.05, s) - Vec3(1.05, 2, 3)).norm(), 1e-12);
}

TEST(CompensatePoint, RejectsEarlierTimestamp) {
  EXPECT_THROW(compensate_point(Vec3::Zero(), 0.99, MotionState::at_rest(1.0)), std::invalid_argument);
}

TEST(ToWorld, Examples) {
  MotionState s;
  EXPECT_EQ(to_world(s, Vec3(1, 1, 1)), Vec3(1, 1, 1));
  s.transform.translation = Vec3(0, 0, 2);
  EXPECT_EQ(to_world(s, Vec3(1, 1, 1)), Vec3(1, 1, 3));
}

TEST(PredictNextState, ZeroStepKeepsState) {
  std::mt19937_64 rng(1);
  const MotionState s = testing::random_state(rng, 2.0);
  const MotionState p = predict_next_state(s, 2.0);
  EXPECT_LT((p.transform.rotation - s.transform.rotation).norm(), 1e-15);
  EXPECT_EQ(p.transform.translation, s.transform.translation);
  EXPECT_LT((p.linear_velocity - s.linear_velocity).norm(), 1e-15);
}

TEST(PredictNextState, PureTranslation) {
  std::mt19937_64 rng(2);
  MotionState s = testing::random_state(rng);
  s.angular_velocity.setZero();
  s.linear_velocity = Vec3(2, 0, 0);
  const MotionState p = predict_next_state(s, 0.1);
  EXPECT_LT((p.transform.translation - (s.transform.translation + s.transform.rotation * Vec3(0.2, 0, 0))).norm(), 1e-12);
  EXPECT_LT((p.transform.rotation - s.transform.rotation).norm(), 1e-15);
  EXPECT_LT((p.linear_velocity - s.linear_velocity).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(p.start_time, 0.1);
}

TEST(PredictNextState, AngularVelocityConjugation) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const MotionState s = testing::random_state(rng);
    const double dt = 0.1;
    const MotionState p = predict_next_state(s, dt);
    const Mat3 e = exp_so3(dt * s.angular_velocity);
    const Mat3 lhs = exp_so3(p.angular_velocity);
    const Mat3 rhs = e.transpose() * exp_so3(s.angular_velocity) * e;
    EXPECT_LT((lhs - rhs).norm(), 1e-9);
    EXPECT_NEAR(p.angular_velocity.norm(), s.angular_velocity.norm(), 1e-12);
  }
}

TEST(PredictNextState, RejectsTimeGoingBackwards) {
  EXPECT_THROW(predict_next_state(MotionState::at_rest(1.0), 0.5), std::invalid_argument);
}

TEST(PredictNextState, SemigroupProperty) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 0.3);
  for (int i = 0; i < 200; ++i) {
    const MotionState s = testing::random_state(rng, 1.0);
    const double ta = 1.0 + u(rng);
    const double tb = ta + u(rng);
    const MotionState two = predict_next_state(predict_next_state(s, ta), tb);
    const MotionState one = predict_next_state(s, tb);
    EXPECT_LT((two.transform.rotation - one.transform.rotation).norm(), 1e-9);
    EXPECT_LT((two.transform.translation - one.transform.translation).norm(), 1e-9);
    EXPECT_LT((two.linear_velocity - one.linear_velocity).norm(), 1e-9);
    EXPECT_LT((two.angular_velocity - one.angular_velocity).norm(), 1e-9);
  }
}

TEST(PredictNextState, OriginCompensationMatchesRelativeMotion) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    MotionState s = testing::random_state(rng);
    s.transform = RigidTransform::identity();
    const double dt = 0.1;
    const Vec3 c = compensate_point(Vec3::Zero(), dt, s);
    EXPECT_LT((c - dt * s.linear_velocity).norm(), 1e-12);
    EXPECT_LT((predict_next_state(s, dt).transform.translation - c).norm(), 1e-12);
  }
}

}  // namespace
}  // namespace lmbao
