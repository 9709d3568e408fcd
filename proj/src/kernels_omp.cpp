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
#include <exception>
#include <limits>
#include <stdexcept>

#include <omp.h>

#include "lmbao/kernels.hpp"

namespace lmbao::kernels {

namespace {

// Runs body(i) for i in [0, n) on the OpenMP team and rethrows the first
// exception on the calling thread.
template <typename Body>
void parallel_for(long n, long chunk, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, chunk)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(lmbao_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

void raycast_omp(const SyntheticWorld& world, std::span<const Ray> rays,
                 const RaycastParams& params, std::span<RayHit> hits) {
  parallel_for(static_cast<long>(rays.size()), 256,
               [&](long i) { hits[i] = raycast_one(world, rays[i], params); });
}

void smoothness_omp(const SphericalImage& img, int window, std::vector<double>& scores) {
  if (window < 1) throw std::invalid_argument("smoothness: window must be >= 1");
  scores.assign(img.cells.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(img.height, 1, [&](long r) {
    for (int c = 0; c < img.width; ++c) {
      scores[static_cast<size_t>(r) * img.width + c] =
          smoothness_at(img, static_cast<int>(r), c, window);
    }
  });
}

void evaluate_landmarks_omp(std::span<const LandmarkProblem> problems,
                            std::span<const MotionState> states, const EvalOptions& options,
                            std::vector<LandmarkTerm>& out) {
  out.resize(problems.size());
  parallel_for(static_cast<long>(problems.size()), 8,
               [&](long i) { out[i] = evaluate_landmark(problems[i], states, options); });
}

}  // namespace lmbao::kernels
