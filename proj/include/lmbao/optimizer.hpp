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

#include "lmbao/kernels.hpp"
#include "lmbao/landmark_map.hpp"
#include "lmbao/residuals.hpp"
#include "lmbao/window.hpp"

namespace lmbao {

struct LmConfig {
  int max_iters = 15;
  double init_damping = 1e-4;
  double damping_increase = 10.0;
  double damping_decrease = 3.0;
  double max_damping = 1e12;
  double relative_tolerance = 1e-6;
  // Converged once |delta| <= step_tolerance * (|x| + step_tolerance), where
  // |x| spans positions and velocities; catches round-off level cost floors.
  double step_tolerance = 1e-10;
  ContinuityWeights weights;
  bool sqrt_n_weighting = true;
  long min_plane_eval = 5;
  long min_edge_eval = 4;
  // Hold the pose of the very first scan while nothing is fixed yet, which
  // removes the global gauge freedom of the bootstrap window.
  bool pin_initial_pose = true;
  bool parallel = true;
};

struct OptimizeResult {
  std::vector<MotionState> states;  // window order
  std::vector<double> cost_trace;   // initial cost, then each accepted step
  int iterations = 0;
  bool converged = false;
};

/// Landmark problems over the window scans; spans point into `map`.
std::vector<kernels::LandmarkProblem> build_problems(const LandmarkMap& map,
                                                     const SlidingWindow& window);

/// Total objective: sum of Huber landmark costs plus squared continuity
/// residuals over pairs with at least one window state.
double window_cost(std::span<const kernels::LandmarkProblem> problems,
                   std::span<const MotionState> states, const MotionState* last_fixed,
                   const LmConfig& config);

/// Levenberg-Marquardt over the window states. Reads map and window only;
/// the caller installs the returned states.
OptimizeResult optimize_window(const LandmarkMap& map, const SlidingWindow& window,
                               const LmConfig& config);

}  // namespace lmbao
