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
#include "lmbao/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace lmbao {

namespace {

struct Linearization {
  double cost = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

kernels::EvalOptions eval_options(const LmConfig& config, bool derivatives) {
  kernels::EvalOptions o;
  o.sqrt_n_weighting = config.sqrt_n_weighting;
  o.derivatives = derivatives;
  o.min_plane_points = config.min_plane_eval;
  o.min_edge_points = config.min_edge_eval;
  return o;
}

void evaluate(std::span<const kernels::LandmarkProblem> problems,
              std::span<const MotionState> states, const LmConfig& config, bool derivatives,
              std::vector<kernels::LandmarkTerm>& terms) {
  const auto opts = eval_options(config, derivatives);
  if (config.parallel) {
    kernels::evaluate_landmarks_omp(problems, states, opts, terms);
  } else {
    kernels::evaluate_landmarks_serial(problems, states, opts, terms);
  }
}

double continuity_cost(std::span<const MotionState> states, const MotionState* last_fixed,
                       const ContinuityWeights& w) {
  double cost = 0.0;
  if (last_fixed && !states.empty()) cost += continuity_residual(*last_fixed, states[0], w).squaredNorm();
  for (size_t i = 1; i < states.size(); ++i) {
    cost += continuity_residual(states[i - 1], states[i], w).squaredNorm();
  }
  return cost;
}

Linearization linearize(std::span<const kernels::LandmarkProblem> problems,
                        std::span<const MotionState> states, const MotionState* last_fixed,
                        const LmConfig& config, std::vector<kernels::LandmarkTerm>& terms) {
  const int n = static_cast<int>(states.size()) * kStateDim;
  Linearization lin;
  lin.gradient = Eigen::VectorXd::Zero(n);
  lin.hessian = Eigen::MatrixXd::Zero(n, n);
  evaluate(problems, states, config, true, terms);

  // Serial reduction in landmark order keeps the sum bit-reproducible.
  for (const auto& t : terms) {
    if (!t.evaluated) continue;
    lin.cost += t.cost;
    for (const auto& sk : t.slots) {
      const int ok = sk.slot * kStateDim;
      lin.gradient.segment<kStateDim>(ok) += sk.gradient;
      lin.hessian.block<kStateDim, kStateDim>(ok, ok) += sk.diagonal;
      for (const auto& sl : t.slots) {
        const int ol = sl.slot * kStateDim;
        for (int u = 0; u < t.couplings; ++u) {
          lin.hessian.block<kStateDim, kStateDim>(ok, ol).noalias() +=
              t.coupling_coeff[u] * (sk.coupling[u].transpose() * sl.coupling[u]);
        }
      }
    }
  }

  const ContinuityWeights& w = config.weights;
  auto add_pair = [&](const MotionState& a, const MotionState& b, int slot_a, int slot_b) {
    const Vec9 r = continuity_residual(a, b, w);
    const ContinuityJacobian j = continuity_jacobian(a, b, w);
    lin.cost += r.squaredNorm();
    const int ob = slot_b * kStateDim;
    lin.gradient.segment<kStateDim>(ob) += 2.0 * j.wrt_b.transpose() * r;
    lin.hessian.block<kStateDim, kStateDim>(ob, ob) += 2.0 * j.wrt_b.transpose() * j.wrt_b;
    if (slot_a < 0) return;
    const int oa = slot_a * kStateDim;
    lin.gradient.segment<kStateDim>(oa) += 2.0 * j.wrt_a.transpose() * r;
    lin.hessian.block<kStateDim, kStateDim>(oa, oa) += 2.0 * j.wrt_a.transpose() * j.wrt_a;
    const Mat12 cross = 2.0 * j.wrt_a.transpose() * j.wrt_b;
    lin.hessian.block<kStateDim, kStateDim>(oa, ob) += cross;
    lin.hessian.block<kStateDim, kStateDim>(ob, oa) += cross.transpose();
  };
  if (last_fixed && !states.empty()) add_pair(*last_fixed, states[0], -1, 0);
  for (size_t i = 1; i < states.size(); ++i) {
    add_pair(states[i - 1], states[i], static_cast<int>(i) - 1, static_cast<int>(i));
  }
  return lin;
}

double state_norm(std::span<const MotionState> states) {
  double sq = 0.0;
  for (const auto& s : states) {
    sq += s.transform.translation.squaredNorm() + s.linear_velocity.squaredNorm() +
          s.angular_velocity.squaredNorm() + 1.0;
  }
  return std::sqrt(sq);
}

}  // namespace

std::vector<kernels::LandmarkProblem> build_problems(const LandmarkMap& map,
                                                     const SlidingWindow& window) {
  std::vector<kernels::LandmarkProblem> problems;
  const auto& entries = window.entries();
  for (const auto& [id, lm] : map.landmarks()) {
    kernels::LandmarkProblem p;
    p.kind = lm.category == FeatureCategory::Plane ? ResidualKind::Plane : ResidualKind::Edge;
    p.marginal = &map.marginal(id);
    for (size_t slot = 0; slot < entries.size(); ++slot) {
      auto it = lm.points_by_scan.find(entries[slot].scan_index);
      if (it == lm.points_by_scan.end() || it->second.empty()) continue;
      p.observations.push_back({static_cast<int>(slot), it->second});
    }
    if (!p.observations.empty()) problems.push_back(std::move(p));
  }
  return problems;
}

double window_cost(std::span<const kernels::LandmarkProblem> problems,
                   std::span<const MotionState> states, const MotionState* last_fixed,
                   const LmConfig& config) {
  std::vector<kernels::LandmarkTerm> terms;
  evaluate(problems, states, config, false, terms);
  double cost = 0.0;
  for (const auto& t : terms) cost += t.cost;
  return cost + continuity_cost(states, last_fixed, config.weights);
}

OptimizeResult optimize_window(const LandmarkMap& map, const SlidingWindow& window,
                               const LmConfig& config) {
  if (window.size() < 2) throw std::invalid_argument("optimize_window: window needs at least 2 states");
  OptimizeResult result;
  for (const auto& e : window.entries()) result.states.push_back(e.state);
  const MotionState* last_fixed = window.last_fixed() ? &window.last_fixed()->state : nullptr;
  const bool pin = config.pin_initial_pose && window.fixed().empty();

  const auto problems = build_problems(map, window);
  std::vector<kernels::LandmarkTerm> terms;
  Linearization lin = linearize(problems, result.states, last_fixed, config, terms);
  double cost = lin.cost;
  result.cost_trace.push_back(cost);

  const int n = static_cast<int>(lin.gradient.size());
  double mu = config.init_damping;
  std::vector<MotionState> candidate(result.states.size());

  while (result.iterations < config.max_iters) {
    if (pin) {
      lin.gradient.head<6>().setZero();
      lin.hessian.topRows<6>().setZero();
      lin.hessian.leftCols<6>().setZero();
    }
    if (!(cost > 1e-24) || lin.gradient.norm() < 1e-14) {
      result.converged = true;
      break;
    }
    ++result.iterations;

    Eigen::MatrixXd a = lin.hessian;
    for (int i = 0; i < n; ++i) a(i, i) += mu * std::max(lin.hessian(i, i), 1e-6);
    if (pin) a.topLeftCorner<6, 6>().setIdentity();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    Eigen::VectorXd delta;
    bool solved = ldlt.info() == Eigen::Success;
    if (solved) {
      delta = ldlt.solve(-lin.gradient);
      solved = delta.allFinite();
    }
    if (solved && delta.norm() <= config.step_tolerance * (state_norm(result.states) + config.step_tolerance)) {
      result.converged = true;
      break;
    }
    double new_cost = cost;
    if (solved) {
      for (size_t k = 0; k < candidate.size(); ++k) {
        candidate[k] = retract(result.states[k], delta.segment<kStateDim>(k * kStateDim));
      }
      new_cost = window_cost(problems, candidate, last_fixed, config);
    }
    if (solved && std::isfinite(new_cost) && new_cost < cost) {
      const double rel = (cost - new_cost) / cost;
      result.states = candidate;
      cost = new_cost;
      result.cost_trace.push_back(cost);
      mu = std::max(mu / config.damping_decrease, 1e-12);
      if (rel < config.relative_tolerance) {
        result.converged = true;
        break;
      }
      lin = linearize(problems, result.states, last_fixed, config, terms);
    } else {
      mu *= config.damping_increase;
      if (mu > config.max_damping) {
        result.converged = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace lmbao
