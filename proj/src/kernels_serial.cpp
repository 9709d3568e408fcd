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
#include <stdexcept>

#include "lmbao/kernels.hpp"

namespace lmbao::kernels {

namespace {

double plane_hit(const PlanePatch& pl, const Ray& ray, const RaycastParams& params) {
  const double denom = pl.normal.dot(ray.direction);
  if (std::abs(denom) < 1e-12) return -1.0;
  const double t = pl.normal.dot(pl.center - ray.origin) / denom;
  if (t < params.min_range || t > params.max_range) return -1.0;
  const Vec3 local = ray.origin + t * ray.direction - pl.center;
  if (std::abs(local.dot(pl.axis_u)) > pl.half_u) return -1.0;
  if (std::abs(local.dot(pl.axis_v())) > pl.half_v) return -1.0;
  return t;
}

// Thin "wire" model: a ray passing within the aperture cone of the segment
// axis returns the closest axis point, so edge returns stay exactly collinear.
bool edge_hit(const EdgeSegment& e, const Ray& ray, const RaycastParams& params, Vec3& point,
              double& range) {
  if (!(params.edge_aperture_tan > 0.0)) return false;
  const Vec3 w0 = ray.origin - e.center;
  const double b = ray.direction.dot(e.direction);
  const double denom = 1.0 - b * b;
  if (denom < 1e-12) return false;
  const double d = ray.direction.dot(w0);
  const double f = e.direction.dot(w0);
  const double t = (b * f - d) / denom;
  const double s = (f - b * d) / denom;
  if (std::abs(s) > e.half_length || t <= 0.0) return false;
  const Vec3 on_axis = e.center + s * e.direction;
  const double miss = (ray.origin + t * ray.direction - on_axis).norm();
  if (miss > params.edge_aperture_tan * t) return false;
  const double r = (on_axis - ray.origin).norm();
  if (r < params.min_range || r > params.max_range) return false;
  point = on_axis;
  range = r;
  return true;
}

}  // namespace

RayHit raycast_one(const SyntheticWorld& world, const Ray& ray, const RaycastParams& params) {
  RayHit best;
  double best_t = std::numeric_limits<double>::infinity();
  for (const auto& pl : world.planes) {
    const double t = plane_hit(pl, ray, params);
    if (t >= 0.0 && t < best_t) {
      best_t = t;
      best.range = t;
      best.point = ray.origin + t * ray.direction;
    }
  }
  for (const auto& e : world.edges) {
    Vec3 p;
    double r = 0.0;
    if (edge_hit(e, ray, params, p, r) && r < best_t) {
      best_t = r;
      best.range = r;
      best.point = p;
    }
  }
  return best;
}

void raycast_serial(const SyntheticWorld& world, std::span<const Ray> rays,
                    const RaycastParams& params, std::span<RayHit> hits) {
  for (size_t i = 0; i < rays.size(); ++i) hits[i] = raycast_one(world, rays[i], params);
}

double smoothness_at(const SphericalImage& img, int row, int col, int window) {
  if (col - window < 0 || col + window >= img.width) return std::numeric_limits<double>::quiet_NaN();
  const SphericalCell& center = img.at(row, col);
  if (!center.occupied() || !(center.range > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (int k = -window; k <= window; ++k) {
    if (k == 0) continue;
    const SphericalCell& n = img.at(row, col + k);
    if (!n.occupied()) return std::numeric_limits<double>::quiet_NaN();
    sum += n.range - center.range;
  }
  return std::abs(sum) / (2.0 * window * center.range);
}

void smoothness_serial(const SphericalImage& img, int window, std::vector<double>& scores) {
  if (window < 1) throw std::invalid_argument("smoothness: window must be >= 1");
  scores.assign(img.cells.size(), std::numeric_limits<double>::quiet_NaN());
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      scores[static_cast<size_t>(r) * img.width + c] = smoothness_at(img, r, c, window);
    }
  }
}

LandmarkTerm evaluate_landmark(const LandmarkProblem& problem, std::span<const MotionState> states,
                               const EvalOptions& options) {
  LandmarkTerm term;
  MomentAccumulator m = problem.marginal ? *problem.marginal : MomentAccumulator{};
  for (const auto& obs : problem.observations) {
    for (const auto& p : obs.points) m.add(world_point(states[obs.slot], p));
  }
  const bool plane = problem.kind == ResidualKind::Plane;
  const long min_points = plane ? options.min_plane_points : options.min_edge_points;
  if (m.count < std::max<long>(min_points, 1)) return term;

  const LandmarkCovariance c = covariance_from_moments(m);
  const double eps = plane ? plane_residual(c) : edge_residual(c);
  const double n = static_cast<double>(m.count);
  const double weight = options.sqrt_n_weighting ? n : 1.0;
  const double s = weight * eps * eps;
  term.evaluated = true;
  term.cost = huber(s);
  if (!options.derivatives) return term;

  const double rho_d = huber_derivative(s);
  auto slot_index = [&term](int slot) -> SlotTerm& {
    for (auto& st : term.slots) {
      if (st.slot == slot) return st;
    }
    term.slots.push_back(SlotTerm{});
    term.slots.back().slot = slot;
    return term.slots.back();
  };

  if (eigen_gap_degenerate(problem.kind, c)) {
    const MomentAccumulator marginal = problem.marginal ? *problem.marginal : MomentAccumulator{};
    const LandmarkJacobian j =
        landmark_residual_jacobian_numeric(problem.kind, marginal, problem.observations, states);
    term.finite_difference = true;
    term.couplings = 1;
    term.coupling_coeff[0] = 2.0 * rho_d * weight;
    for (const auto& obs : problem.observations) {
      if (obs.points.empty()) continue;
      SlotTerm& st = slot_index(obs.slot);
      st.coupling[0] = j.wrt_slot[obs.slot];
      st.gradient = term.coupling_coeff[0] * eps * j.wrt_slot[obs.slot].transpose();
    }
    return term;
  }

  // Residual directions u and, for each, the fit direction it can rotate
  // towards: plane normal u0 against u1, u2; line normals u0, u1 against u2.
  struct Refit {
    int residual_dir;
    int fit_dir;
  };
  const int dirs = plane ? 1 : 2;
  const Refit refits[2] = {plane ? Refit{0, 1} : Refit{0, 2}, plane ? Refit{0, 2} : Refit{1, 2}};
  const double coeff = 2.0 * rho_d * weight / n;
  term.couplings = dirs + 2;
  for (int u = 0; u < dirs; ++u) term.coupling_coeff[u] = -coeff / n;
  for (int r = 0; r < 2; ++r) {
    const double spread = std::max(c.eigenvalues[refits[r].fit_dir], 0.0);
    term.coupling_coeff[dirs + r] = spread > 0.0 ? -coeff / (n * spread) : 0.0;
  }
  for (const auto& obs : problem.observations) {
    if (obs.points.empty()) continue;
    SlotTerm& st = slot_index(obs.slot);
    const MotionState& state = states[obs.slot];
    for (const auto& p : obs.points) {
      Vec3 w;
      const Mat3x12 a = world_point_jacobian(state, p, &w);
      const Vec3 d = w - c.mean;
      Row12 au[2];
      for (int u = 0; u < dirs; ++u) {
        const Vec3 dir = c.eigenvectors.col(u);
        au[u] = dir.transpose() * a;
        st.gradient.noalias() += (coeff * dir.dot(d)) * au[u].transpose();
        st.diagonal.noalias() += coeff * (au[u].transpose() * au[u]);
        st.coupling[u] += au[u];
      }
      for (int r = 0; r < 2; ++r) {
        st.coupling[dirs + r] += c.eigenvectors.col(refits[r].fit_dir).dot(d) * au[refits[r].residual_dir];
      }
    }
  }
  return term;
}

void evaluate_landmarks_serial(std::span<const LandmarkProblem> problems,
                               std::span<const MotionState> states, const EvalOptions& options,
                               std::vector<LandmarkTerm>& out) {
  out.resize(problems.size());
  for (size_t i = 0; i < problems.size(); ++i) out[i] = evaluate_landmark(problems[i], states, options);
}

}  // namespace lmbao::kernels
