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
#include "lmbao/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "lmbao/kernels.hpp"

namespace lmbao {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 any_perpendicular(const Vec3& n) {
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return n.cross(helper).normalized();
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

bool inside(const Vec3& p, const WorldConfig& c) {
  return (p.array() >= c.bounds_min.array() - 1e-12).all() &&
         (p.array() <= c.bounds_max.array() + 1e-12).all();
}

PlanePatch make_plane(const Vec3& center, const Vec3& normal, const Vec3& axis_u, double hu,
                      double hv) {
  PlanePatch p;
  p.center = center;
  p.normal = normal.normalized();
  p.axis_u = (axis_u - p.normal * p.normal.dot(axis_u)).normalized();
  p.half_u = hu;
  p.half_v = hv;
  return p;
}

// Distance from a wall to the center of a box yawed by `yaw` relative to it,
// leaving a gap wide enough that the hidden back face never lies near the
// wall plane.
double wall_clearance(const Vec3& half, double yaw) {
  constexpr double kGap = 0.3;
  return half.y() * std::cos(yaw) + half.x() * std::abs(std::sin(yaw)) + kGap;
}

// Six faces of a box with yaw about +z.
void add_box(std::vector<PlanePatch>& planes, const Vec3& center, const Vec3& half, double yaw) {
  const Mat3 r = exp_so3(Vec3(0.0, 0.0, yaw));
  const Vec3 ex = r.col(0);
  const Vec3 ey = r.col(1);
  const Vec3 ez = r.col(2);
  planes.push_back(make_plane(center + half.x() * ex, ex, ey, half.y(), half.z()));
  planes.push_back(make_plane(center - half.x() * ex, -ex, ey, half.y(), half.z()));
  planes.push_back(make_plane(center + half.y() * ey, ey, ex, half.x(), half.z()));
  planes.push_back(make_plane(center - half.y() * ey, -ey, ex, half.x(), half.z()));
  planes.push_back(make_plane(center + half.z() * ez, ez, ex, half.x(), half.y()));
  planes.push_back(make_plane(center - half.z() * ez, -ez, ex, half.x(), half.y()));
}

void generate_random(const WorldConfig& c, std::mt19937_64& rng, SyntheticWorld& world) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto sample_in_bounds = [&]() {
    Vec3 p;
    for (int i = 0; i < 3; ++i) {
      p[i] = c.bounds_min[i] + u01(rng) * (c.bounds_max[i] - c.bounds_min[i]);
    }
    return p;
  };
  auto extent = [&]() { return c.min_half_extent + u01(rng) * (c.max_half_extent - c.min_half_extent); };

  for (int i = 0; i < c.num_planes; ++i) {
    const Vec3 n = random_unit(rng);
    PlanePatch p = make_plane(sample_in_bounds(), n, any_perpendicular(n), extent(), extent());
    // Shrink until all four corners are inside the bounds.
    for (int iter = 0; iter < 200; ++iter) {
      const Vec3 du = p.half_u * p.axis_u;
      const Vec3 dv = p.half_v * p.axis_v();
      if (inside(p.center + du + dv, c) && inside(p.center + du - dv, c) &&
          inside(p.center - du + dv, c) && inside(p.center - du - dv, c)) {
        break;
      }
      p.half_u *= 0.8;
      p.half_v *= 0.8;
    }
    world.planes.push_back(p);
  }
  for (int i = 0; i < c.num_edges; ++i) {
    EdgeSegment e;
    e.center = sample_in_bounds();
    e.direction = random_unit(rng);
    e.half_length = extent();
    for (int iter = 0; iter < 200; ++iter) {
      if (inside(e.center + e.half_length * e.direction, c) &&
          inside(e.center - e.half_length * e.direction, c)) {
        break;
      }
      e.half_length *= 0.8;
    }
    world.edges.push_back(e);
  }
}

void generate_corridor(const WorldConfig& c, std::mt19937_64& rng, SyntheticWorld& world) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double x0 = c.corridor_start;
  const double x1 = c.corridor_end;
  const double w = c.corridor_half_width;
  const double xm = 0.5 * (x0 + x1);
  const double hx = 0.5 * (x1 - x0);
  const double zm = 0.5 * (c.floor_z + c.ceiling_z);
  const double hz = 0.5 * (c.ceiling_z - c.floor_z);

  auto& planes = world.planes;
  planes.push_back(make_plane({xm, 0.0, c.floor_z}, Vec3::UnitZ(), Vec3::UnitX(), hx, w));
  planes.push_back(make_plane({xm, 0.0, c.ceiling_z}, -Vec3::UnitZ(), Vec3::UnitX(), hx, w));
  planes.push_back(make_plane({xm, w, zm}, -Vec3::UnitY(), Vec3::UnitX(), hx, hz));
  planes.push_back(make_plane({xm, -w, zm}, Vec3::UnitY(), Vec3::UnitX(), hx, hz));
  planes.push_back(make_plane({x0, 0.0, zm}, Vec3::UnitX(), Vec3::UnitY(), w, hz));
  planes.push_back(make_plane({x1, 0.0, zm}, -Vec3::UnitX(), Vec3::UnitY(), w, hz));

  for (int i = 0; i < c.num_planes; ++i) {
    const double side = (i % 2 == 0) ? 1.0 : -1.0;
    const Vec3 half(0.3 + 0.5 * u01(rng), 0.2 + 0.3 * u01(rng), 0.3 + 0.6 * u01(rng));
    const double x = x0 + 2.0 + u01(rng) * (x1 - x0 - 4.0);
    const double yaw = (u01(rng) - 0.5) * 0.3;
    const double y = side * (w - wall_clearance(half, yaw));
    add_box(planes, {x, y, c.floor_z + half.z() + 1e-3}, half, yaw);
  }
  for (int i = 0; i < c.num_edges; ++i) {
    const double side = (i % 2 == 0) ? -1.0 : 1.0;
    EdgeSegment e;
    e.center = Vec3(x0 + 1.0 + u01(rng) * (x1 - x0 - 2.0), side * (0.9 + 0.7 * u01(rng)), zm);
    e.direction = Vec3::UnitZ();
    e.half_length = hz - 1e-3;
    world.edges.push_back(e);
  }
}

void generate_loop(const WorldConfig& c, std::mt19937_64& rng, SyntheticWorld& world) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double w = c.corridor_half_width;
  const double center_half = 0.5 * c.loop_side + c.loop_corner_radius;  // road centerline
  const double inner = center_half - w;
  const double outer = center_half + w;
  const double zm = 0.5 * (c.floor_z + c.loop_wall_top);
  const double hz = 0.5 * (c.loop_wall_top - c.floor_z);

  auto& planes = world.planes;
  planes.push_back(make_plane({0.0, 0.0, c.floor_z}, Vec3::UnitZ(), Vec3::UnitX(), outer, outer));
  // Outer walls face inward, inner block walls face outward.
  planes.push_back(make_plane({0.0, outer, zm}, -Vec3::UnitY(), Vec3::UnitX(), outer, hz));
  planes.push_back(make_plane({0.0, -outer, zm}, Vec3::UnitY(), Vec3::UnitX(), outer, hz));
  planes.push_back(make_plane({outer, 0.0, zm}, -Vec3::UnitX(), Vec3::UnitY(), outer, hz));
  planes.push_back(make_plane({-outer, 0.0, zm}, Vec3::UnitX(), Vec3::UnitY(), outer, hz));
  planes.push_back(make_plane({0.0, inner, zm}, Vec3::UnitY(), Vec3::UnitX(), inner, hz));
  planes.push_back(make_plane({0.0, -inner, zm}, -Vec3::UnitY(), Vec3::UnitX(), inner, hz));
  planes.push_back(make_plane({inner, 0.0, zm}, Vec3::UnitX(), Vec3::UnitY(), inner, hz));
  planes.push_back(make_plane({-inner, 0.0, zm}, -Vec3::UnitX(), Vec3::UnitY(), inner, hz));

  // Boxes against the outer walls, poles along the road.
  auto wall_point = [&](double s, double offset) -> std::pair<Vec3, double> {
    // s in [0, 4): side index + fraction along it; returns point and wall yaw.
    const int side = static_cast<int>(s) % 4;
    const double f = s - std::floor(s);
    const double along = (f - 0.5) * 2.0 * (outer - 1.0);
    const double d = outer - offset;
    switch (side) {
      case 0: return {Vec3(along, -d, 0.0), 0.0};
      case 1: return {Vec3(d, along, 0.0), 0.5 * kPi};
      case 2: return {Vec3(-along, d, 0.0), kPi};
      default: return {Vec3(-d, -along, 0.0), 1.5 * kPi};
    }
  };
  for (int i = 0; i < c.num_planes; ++i) {
    const Vec3 half(0.3 + 0.5 * u01(rng), 0.2 + 0.3 * u01(rng), 0.3 + 0.6 * u01(rng));
    const double s = 4.0 * u01(rng);
    const double dyaw = (u01(rng) - 0.5) * 0.3;
    auto [p, yaw] = wall_point(s, wall_clearance(half, dyaw));
    p.z() = c.floor_z + half.z() + 1e-3;
    add_box(planes, p, half, yaw + dyaw);
  }
  for (int i = 0; i < c.num_edges; ++i) {
    auto [p, yaw] = wall_point(4.0 * u01(rng), w - 0.9 - 0.7 * u01(rng));
    (void)yaw;
    EdgeSegment e;
    e.center = Vec3(p.x(), p.y(), zm);
    e.direction = Vec3::UnitZ();
    e.half_length = hz - 1e-3;
    world.edges.push_back(e);
  }
}

}  // namespace

SyntheticWorld generate_world(const WorldConfig& config, std::uint64_t seed) {
  if (config.num_planes < 0 || config.num_edges < 0) {
    throw std::invalid_argument("generate_world: counts must be non-negative");
  }
  std::mt19937_64 rng(seed);
  SyntheticWorld world;
  world.seed = seed;
  switch (config.layout) {
    case WorldLayout::Random: generate_random(config, rng, world); break;
    case WorldLayout::Corridor: generate_corridor(config, rng, world); break;
    case WorldLayout::Loop: generate_loop(config, rng, world); break;
  }
  return world;
}

double BeamModel::column_step() const { return 2.0 * kPi / columns; }

double BeamModel::ring_elevation(int ring) const {
  const double lo = elev_min_deg * kPi / 180.0;
  const double hi = elev_max_deg * kPi / 180.0;
  if (rings <= 1) return lo;
  return lo + (hi - lo) * ring / (rings - 1);
}

Trajectory Trajectory::stationary(const RigidTransform& pose) {
  Trajectory t;
  t.pose_ = [pose](double) { return pose; };
  t.exact_twist_ = true;
  return t;
}

Trajectory Trajectory::constant_twist(const RigidTransform& start, const Vec3& v, const Vec3& w) {
  Trajectory t;
  t.pose_ = [start, v, w](double time) {
    RigidTransform rel;
    rel.rotation = exp_so3(time * w);
    rel.translation = time * v;
    return compose(start, rel);
  };
  t.exact_twist_ = true;
  t.v_ = v;
  t.w_ = w;
  return t;
}

Trajectory Trajectory::square_loop(double side, double radius, double speed, double z) {
  const double half = 0.5 * side;
  const double quarter_arc = 0.5 * kPi * radius;
  const double leg = side + quarter_arc;  // straight + corner
  const double perimeter = 4.0 * leg;
  Trajectory t;
  t.pose_ = [=](double time) {
    double s = std::fmod(speed * time, perimeter);
    if (s < 0.0) s += perimeter;
    // Start mid bottom straight: shift so s=0 is at x=0 on the bottom side.
    s += half;
    if (s >= perimeter) s -= perimeter;
    const int k = static_cast<int>(s / leg) % 4;
    const double local = s - k * leg;
    // Local frame of leg k: straight from (-half, -(half+radius)) heading +x.
    Vec3 p;
    double yaw;
    if (local < side) {
      p = Vec3(-half + local, -(half + radius), 0.0);
      yaw = 0.0;
    } else {
      const double a = (local - side) / radius;
      p = Vec3(half + radius * std::sin(a), -half - radius * std::cos(a), 0.0);
      yaw = a;
    }
    const double leg_yaw = 0.5 * kPi * k;
    const Mat3 rk = exp_so3(Vec3(0.0, 0.0, leg_yaw));
    RigidTransform out;
    out.rotation = exp_so3(Vec3(0.0, 0.0, leg_yaw + yaw));
    out.translation = rk * p + Vec3(0.0, 0.0, z);
    return out;
  };
  return t;
}

MotionState Trajectory::state_at(double t) const {
  MotionState s;
  s.start_time = t;
  s.transform = pose_(t);
  if (exact_twist_) {
    s.linear_velocity = exp_so3(-t * w_) * v_;
    s.angular_velocity = w_;
    return s;
  }
  const double h = 1e-5;
  const RigidTransform a = pose_(t - h);
  const RigidTransform b = pose_(t + h);
  const Mat3& r = s.transform.rotation;
  s.linear_velocity = r.transpose() * (b.translation - a.translation) / (2.0 * h);
  s.angular_velocity = log_so3(a.rotation.transpose() * b.rotation) / (2.0 * h);
  return s;
}

double Trajectory::path_length(double t0, double t1, int steps) const {
  double len = 0.0;
  Vec3 prev = pose_(t0).translation;
  for (int i = 1; i <= steps; ++i) {
    const Vec3 cur = pose_(t0 + (t1 - t0) * i / steps).translation;
    len += (cur - prev).norm();
    prev = cur;
  }
  return len;
}

Scan simulate_scan(const SyntheticWorld& world, const PoseFunction& trajectory, double t_start,
                   double sweep_duration, const BeamModel& beam, int index) {
  if (beam.columns <= 0 || beam.rings <= 0 || !(sweep_duration > 0.0)) {
    throw std::invalid_argument("simulate_scan: invalid beam model");
  }
  const int n_rays = beam.columns * beam.rings;
  std::vector<kernels::Ray> rays(n_rays);
  std::vector<RigidTransform> column_pose(beam.columns);
  std::vector<double> column_time(beam.columns);
  std::vector<Vec3> ring_dir(beam.rings);
  for (int r = 0; r < beam.rings; ++r) {
    const double e = beam.ring_elevation(r);
    ring_dir[r] = Vec3(std::cos(e), 0.0, std::sin(e));
  }
  for (int c = 0; c < beam.columns; ++c) {
    column_time[c] = t_start + sweep_duration * c / beam.columns;
    column_pose[c] = trajectory(column_time[c]);
    const Mat3 az = exp_so3(Vec3(0.0, 0.0, beam.column_step() * c));
    for (int r = 0; r < beam.rings; ++r) {
      auto& ray = rays[c * beam.rings + r];
      ray.origin = column_pose[c].translation;
      ray.direction = column_pose[c].rotation * (az * ring_dir[r]);
    }
  }

  kernels::RaycastParams params;
  params.min_range = beam.min_range;
  params.max_range = beam.max_range;
  params.edge_aperture_tan = std::tan(beam.edge_aperture * beam.column_step());
  std::vector<kernels::RayHit> hits(n_rays);
  kernels::raycast_omp(world, rays, params, hits);

  std::mt19937_64 rng(world.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(index) + 1);
  std::normal_distribution<double> noise(0.0, beam.noise_sigma > 0.0 ? beam.noise_sigma : 1.0);

  Scan scan;
  scan.index = index;
  scan.start_time = t_start;
  scan.sweep_duration = sweep_duration;
  scan.points.reserve(n_rays);
  for (int c = 0; c < beam.columns; ++c) {
    const RigidTransform inv = column_pose[c].inverse();
    for (int r = 0; r < beam.rings; ++r) {
      const auto& hit = hits[c * beam.rings + r];
      if (hit.range < 0.0) continue;
      Vec3 p = inv * hit.point;
      if (beam.noise_sigma > 0.0) {
        const double range = p.norm();
        p *= (range + noise(rng)) / range;
      }
      scan.points.push_back({p, column_time[c]});
    }
  }
  if (scan.points.empty()) throw std::runtime_error("simulate_scan: no ray intersected the world");
  scan.start_time = scan.points.front().timestamp;
  return scan;
}

SyntheticRun simulate_run(const SyntheticWorld& world, const Trajectory& trajectory,
                          const BeamModel& beam, int num_scans, double scan_period, double t0) {
  SyntheticRun run;
  const RigidTransform origin_inv = trajectory.pose(t0).inverse();
  const auto fn = trajectory.function();
  for (int k = 0; k < num_scans; ++k) {
    const double t = t0 + k * scan_period;
    run.scans.push_back(simulate_scan(world, fn, t, scan_period, beam, k));
    run.ground_truth.push_back({t, compose(origin_inv, trajectory.pose(t))});
    run.true_states.push_back(trajectory.state_at(t));
  }
  return run;
}

}  // namespace lmbao
