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

#include <vector>

#include "lmbao/scan_io.hpp"

namespace lmbao {

struct AteResult {
  double rmse = 0.0;
  int pairs = 0;
  RigidTransform alignment;  // maps estimate positions onto ground truth
};

/// Associates each estimate with the nearest ground-truth timestamp within
/// `tolerance` (non-positive: half the median ground-truth spacing), aligns
/// with the closed-form rigid fit (no scale) and returns the translational
/// RMSE. Throws with fewer than 2 associated pairs.
AteResult ate_rmse(const std::vector<StampedPose>& estimated,
                   const std::vector<StampedPose>& ground_truth, double tolerance = 0.0);

/// Closed-form rigid transform T minimizing sum |T * src_i - dst_i|^2.
RigidTransform align_rigid(const std::vector<Vec3>& src, const std::vector<Vec3>& dst);

}  // namespace lmbao
