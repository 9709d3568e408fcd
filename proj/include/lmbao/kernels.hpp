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

// Hot loops of the engine. Each kernel has a serial reference and an
// OpenMP version; both write every output slot independently, so their
// results are bit-identical for any thread count.

#include <span>
#include <vector>

#include "lmbao/feature_extract.hpp"
#include "lmbao/moments.hpp"
#include "lmbao/residuals.hpp"
#include "lmbao/synthetic.hpp"

namespace lmbao::kernels {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();  // unit length
};

struct RayHit {
  double range = -1.0;  // negative: no hit
  Vec3 point = Vec3::Zero();
};

struct RaycastParams {
  double min_range = 0.3;
  double max_range = 120.0;
  // A ray captures an edge segment when the segment subtends an angle whose
  // tangent is below this, measured from the ray origin.
  double edge_aperture_tan = 0.0;
};

/// Nearest plane patch or edge segment along a single ray.
RayHit raycast_one(const SyntheticWorld& world, const Ray& ray, const RaycastParams& params);

void raycast_serial(const SyntheticWorld& world, std::span<const Ray> rays,
                    const RaycastParams& params, std::span<RayHit> hits);
void raycast_omp(const SyntheticWorld& world, std::span<const Ray> rays,
                 const RaycastParams& params, std::span<RayHit> hits);

/// Range-normalized curvature |sum_j (r_j - r_i)| / (|N| r_i) over the 2*window
/// same-row neighbors. Cells lacking a full neighborhood get NaN.
double smoothness_at(const SphericalImage& img, int row, int col, int window);

void smoothness_serial(const SphericalImage& img, int window, std::vector<double>& scores);
void smoothness_omp(const SphericalImage& img, int window, std::vector<double>& scores);

/// One landmark as seen by the optimizer.
struct LandmarkProblem {
  ResidualKind kind = ResidualKind::Plane;
  const MomentAccumulator* marginal = nullptr;
  std::vector<ScanObservation> observations;
};

struct EvalOptions {
  bool sqrt_n_weighting = true;
  bool derivatives = true;
  long min_plane_points = 5;
  long min_edge_points = 4;
};

inline constexpr int kMaxCouplings = 4;

struct SlotTerm {
  int slot = 0;
  Vec12 gradient = Vec12::Zero();
  Mat12 diagonal = Mat12::Zero();
  Row12 coupling[kMaxCouplings] = {Row12::Zero(), Row12::Zero(), Row12::Zero(), Row12::Zero()};
};

/// Robustified cost of one landmark plus its Gauss-Newton pieces:
///   g_k  = slots[k].gradient
///   H_kl = delta_kl * slots[k].diagonal
///          + sum_u coupling_coeff[u] * slots[k].coupling[u]^T slots[l].coupling[u]
///
/// The couplings are the mean-centering terms (one per residual direction)
/// followed by the fit-refit terms, which remove the part of each point motion
/// that a re-fitted plane or line absorbs (variable projection).
struct LandmarkTerm {
  double cost = 0.0;
  bool evaluated = false;
  bool finite_difference = false;
  int couplings = 0;
  double coupling_coeff[kMaxCouplings] = {0.0, 0.0, 0.0, 0.0};
  std::vector<SlotTerm> slots;
};

LandmarkTerm evaluate_landmark(const LandmarkProblem& problem, std::span<const MotionState> states,
                               const EvalOptions& options);

void evaluate_landmarks_serial(std::span<const LandmarkProblem> problems,
                               std::span<const MotionState> states, const EvalOptions& options,
                               std::vector<LandmarkTerm>& out);
void evaluate_landmarks_omp(std::span<const LandmarkProblem> problems,
                            std::span<const MotionState> states, const EvalOptions& options,
                            std::vector<LandmarkTerm>& out);

}  // namespace lmbao::kernels
