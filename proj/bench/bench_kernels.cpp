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
// Serial reference kernels against their OpenMP counterparts on a default
// 64x1800 synthetic corridor scan.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "lmbao/kernels.hpp"
#include "lmbao/optimizer.hpp"
#include "lmbao/pipeline.hpp"
#include "lmbao/synthetic.hpp"

namespace {

using namespace lmbao;

SyntheticWorld corridor() {
  WorldConfig c;
  c.layout = WorldLayout::Corridor;
  c.num_planes = 12;
  c.num_edges = 10;
  return generate_world(c, 7);
}

const Trajectory& straight() {
  static const Trajectory t = Trajectory::constant_twist({}, Vec3(1.5, 0.0, 0.0), Vec3::Zero());
  return t;
}

std::vector<kernels::Ray> full_beam() {
  const BeamModel beam;
  std::vector<kernels::Ray> rays;
  rays.reserve(static_cast<size_t>(beam.rings) * beam.columns);
  for (int r = 0; r < beam.rings; ++r) {
    const double el = beam.ring_elevation(r);
    for (int c = 0; c < beam.columns; ++c) {
      const double az = c * beam.column_step();
      kernels::Ray ray;
      ray.direction = Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
      rays.push_back(ray);
    }
  }
  return rays;
}

template <bool Parallel>
void BM_Raycast(benchmark::State& state) {
  const SyntheticWorld world = corridor();
  const auto rays = full_beam();
  kernels::RaycastParams params;
  params.edge_aperture_tan = std::tan(0.5 * BeamModel{}.column_step());
  std::vector<kernels::RayHit> hits(rays.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::raycast_omp(world, rays, params, hits);
    } else {
      kernels::raycast_serial(world, rays, params, hits);
    }
    benchmark::DoNotOptimize(hits.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rays.size()));
}

const SphericalImage& image() {
  static const SphericalImage img = [] {
    const Scan scan = simulate_scan(corridor(), straight().function(), 0.0, 0.1, BeamModel{});
    return project_spherical(scan, straight().state_at(0.0), ProjectionParams{});
  }();
  return img;
}

template <bool Parallel>
void BM_Smoothness(benchmark::State& state) {
  const SphericalImage& img = image();
  std::vector<double> scores;
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::smoothness_omp(img, 5, scores);
    } else {
      kernels::smoothness_serial(img, 5, scores);
    }
    benchmark::DoNotOptimize(scores.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(img.cells.size()));
}

// Window snapshot after a short odometry run: the map and states that
// optimize_window evaluates on every LM iteration.
struct WindowSnapshot {
  OdometryEngine engine;
  std::vector<kernels::LandmarkProblem> problems;
  std::vector<MotionState> states;
};

const WindowSnapshot& snapshot() {
  static const WindowSnapshot* snap = [] {
    auto* s = new WindowSnapshot;
    const SyntheticRun run = simulate_run(corridor(), straight(), BeamModel{}, 12);
    for (const auto& scan : run.scans) s->engine.process_scan(scan);
    s->problems = build_problems(s->engine.map(), s->engine.window());
    for (const auto& e : s->engine.window().entries()) s->states.push_back(e.state);
    return s;
  }();
  return *snap;
}

template <bool Parallel>
void BM_LandmarkEvaluation(benchmark::State& state) {
  const WindowSnapshot& snap = snapshot();
  std::vector<kernels::LandmarkTerm> terms;
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::evaluate_landmarks_omp(snap.problems, snap.states, kernels::EvalOptions{}, terms);
    } else {
      kernels::evaluate_landmarks_serial(snap.problems, snap.states, kernels::EvalOptions{}, terms);
    }
    benchmark::DoNotOptimize(terms.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(snap.problems.size()));
}

BENCHMARK(BM_Raycast<false>)->Name("raycast/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Raycast<true>)->Name("raycast/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Smoothness<false>)->Name("smoothness/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Smoothness<true>)->Name("smoothness/omp")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LandmarkEvaluation<false>)->Name("landmarks/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LandmarkEvaluation<true>)->Name("landmarks/omp")->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
