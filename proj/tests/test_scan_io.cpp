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
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "lmbao/scan_io.hpp"
#include "test_support.hpp"

namespace lmbao {
namespace {

namespace fs = std::filesystem;

class ScanIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lmbao_scan_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

TEST_F(ScanIoTest, ReadsWellFormedFile) {
  const auto p = write("a.txt",
                       "# lmbao-scan v1 start=1.000000 duration=0.100000\n"
                       "1 2 3 1.0\n"
                       "4 5 6 1.01\n"
                       "7 8 9 1.02\n");
  const Scan s = read_scan_file(p, 7);
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_EQ(s.index, 7);
  EXPECT_DOUBLE_EQ(s.start_time, 1.0);
  EXPECT_DOUBLE_EQ(s.sweep_duration, 0.1);
  EXPECT_EQ(s.points[2].position, Vec3(7, 8, 9));
  EXPECT_DOUBLE_EQ(s.points[1].timestamp, 1.01);
}

TEST_F(ScanIoTest, NonNumericFieldNamesRowAndColumn) {
  const auto p = write("a.txt",
                       "# lmbao-scan v1 start=0 duration=0.1\n"
                       "1 2 3 0.0\n"
                       "abc 2 3 0.01\n");
  try {
    read_scan_file(p);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3);
    EXPECT_EQ(e.column(), 1);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
}

TEST_F(ScanIoTest, RejectsMissingEmptyAndMalformed) {
  EXPECT_THROW(read_scan_file(dir_ / "missing.txt"), std::runtime_error);
  EXPECT_THROW(read_scan_file(write("e.txt", "# lmbao-scan v1 start=0 duration=0.1\n")),
               std::runtime_error);
  EXPECT_THROW(read_scan_file(write("h.txt", "1 2 3 0\n")), ParseError);
  EXPECT_THROW(read_scan_file(write("f.txt", "# lmbao-scan v1 start=0 duration=0.1\n1 2 0\n")),
               ParseError);
  EXPECT_THROW(read_scan_file(write("t.txt",
                                    "# lmbao-scan v1 start=0 duration=0.1\n1 2 3 0.02\n1 2 3 0.01\n")),
               ParseError);
}

TEST_F(ScanIoTest, RoundTripWithinFormattingPrecision) {
  std::mt19937_64 rng(3);
  Scan s;
  s.start_time = 12.5;
  s.sweep_duration = 0.1;
  std::uniform_real_distribution<double> dt(0.0, 1e-4);
  double t = s.start_time;
  for (int i = 0; i < 500; ++i) {
    s.points.push_back({testing::random_vec(rng, 20.0), t});
    t += dt(rng);
  }
  const fs::path p = dir_ / "scan.txt";
  write_scan_file(s, p);
  const Scan r = read_scan_file(p);
  ASSERT_EQ(r.points.size(), s.points.size());
  for (size_t i = 0; i < s.points.size(); ++i) {
    EXPECT_LE((r.points[i].position - s.points[i].position).cwiseAbs().maxCoeff(), 5e-7);
    EXPECT_LE(std::abs(r.points[i].timestamp - s.points[i].timestamp), 5e-7);
  }
  // A second round trip is exact.
  write_scan_file(r, p);
  const Scan r2 = read_scan_file(p);
  for (size_t i = 0; i < r.points.size(); ++i) {
    EXPECT_EQ(r2.points[i].position, r.points[i].position);
    EXPECT_EQ(r2.points[i].timestamp, r.points[i].timestamp);
  }
}

TEST_F(ScanIoTest, ListScanFilesSortedAndEmptyDirectoryFails) {
  EXPECT_THROW(list_scan_files(dir_), std::runtime_error);
  write("000002.txt", "");
  write("000010.txt", "");
  write("000001.txt", "");
  const auto files = list_scan_files(dir_);
  ASSERT_EQ(files.size(), 3u);
  EXPECT_EQ(files[0].filename(), "000001.txt");
  EXPECT_EQ(files[2].filename(), "000010.txt");
}

TEST(TrajectoryFormat, IdentityAndTranslation) {
  EXPECT_EQ(format_trajectory_line({0.0, RigidTransform::identity()}), "0.000000 0 0 0 0 0 0 1");
  RigidTransform t;
  t.translation = Vec3(1, 2, 3);
  EXPECT_EQ(format_trajectory_line({2.5, t}), "2.500000 1 2 3 0 0 0 1");
}

TEST_F(ScanIoTest, QuarterTurnQuaternion) {
  RigidTransform t;
  t.rotation = exp_so3(Vec3(0, 0, std::numbers::pi / 2));
  const fs::path p = dir_ / "traj.txt";
  write_trajectory({{0.0, t}}, p);
  std::ifstream in(p);
  double v[8];
  for (double& x : v) in >> x;
  const double h = std::sqrt(0.5);
  EXPECT_NEAR(v[4], 0.0, 1e-9);
  EXPECT_NEAR(v[5], 0.0, 1e-9);
  // Six printed decimals bound the comparison.
  EXPECT_NEAR(v[6], h, 1e-6);
  EXPECT_NEAR(v[7], h, 1e-6);
  EXPECT_NEAR(std::sqrt(v[4] * v[4] + v[5] * v[5] + v[6] * v[6] + v[7] * v[7]), 1.0, 1e-6);
}

TEST_F(ScanIoTest, TrajectoryRoundTrip) {
  std::mt19937_64 rng(9);
  std::vector<StampedPose> poses;
  for (int i = 0; i < 50; ++i) poses.push_back({0.1 * i, testing::random_transform(rng)});
  const fs::path p = dir_ / "traj.txt";
  write_trajectory(poses, p);
  const auto back = read_trajectory(p);
  ASSERT_EQ(back.size(), poses.size());
  for (size_t i = 0; i < poses.size(); ++i) {
    EXPECT_NEAR(back[i].time, poses[i].time, 1e-9);
    EXPECT_LT((back[i].pose.translation - poses[i].pose.translation).norm(), 1e-5);
    EXPECT_LT((back[i].pose.rotation - poses[i].pose.rotation).norm(), 1e-5);
    EXPECT_TRUE(is_rotation(back[i].pose.rotation, 1e-9));
  }
}

}  // namespace
}  // namespace lmbao
