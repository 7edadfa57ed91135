// Copyright 2026 The rollover-deepc Authors
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

#ifndef RDEEPC_PLANT_TIRE_HPP_
#define RDEEPC_PLANT_TIRE_HPP_

#include <algorithm>
#include <cmath>

#include "rdeepc/plant/params.hpp"
#include "rdeepc/plant/state.hpp"

namespace rdeepc::plant {

/// Below this speed slip quantities are blended linearly to zero.
inline constexpr double kLowSpeedGuard = 0.1;

struct TireSlip {
  double lambda = 0.0;
  double alpha = 0.0;
};

struct TireForce {
  double fx = 0.0;  // along the wheel heading
  double fy = 0.0;  // perpendicular to it, positive left
};

/// Hub velocity of a wheel projected on its own heading.
inline double wheel_hub_speed(const VehicleState& s, int wheel, double delta,
                              const VehicleParams& vp) {
  const double side = is_left(wheel) ? 0.5 * vp.l_w : -0.5 * vp.l_w;
  const double u = s.vx - s.r * side;
  if (!is_front(wheel)) return u;
  const double v = s.vy + s.r * vp.l_f;
  return u * std::cos(delta) + v * std::sin(delta);
}

inline double slip_ratio(double hub_speed, double wheel_speed_times_radius) {
  const double rw = wheel_speed_times_radius;
  const double u = hub_speed;
  if (std::max(std::abs(u), std::abs(rw)) < kLowSpeedGuard) return (rw - u) / kLowSpeedGuard;
  return rw < u ? (rw - u) / u : (rw - u) / rw;
}

/// Slip ratio from the wheel hub speed and slip angle from the axle kinematics.
inline TireSlip tire_slip(const VehicleState& s, int wheel, double delta, const VehicleParams& vp) {
  TireSlip out;
  const double u_w = wheel_hub_speed(s, wheel, delta, vp);
  out.lambda = slip_ratio(u_w, vp.r_w * s.omega[static_cast<size_t>(wheel)]);

  const double u = std::max(s.vx, kLowSpeedGuard);
  if (is_front(wheel)) {
    out.alpha = delta - std::atan((s.vy + vp.l_f * s.r) / u);
  } else {
    out.alpha = std::atan((-s.vy + vp.l_r * s.r) / u);
  }
  if (s.vx < kLowSpeedGuard) out.alpha *= std::max(s.vx, 0.0) / kLowSpeedGuard;
  return out;
}

/// Peak horizontal force for vertical load fz.
inline double peak_force(double fz, const TireParams& tp, double mass, double g) {
  const double w = 1.5 * fz / (mass * g);
  return fz * 1.0527 * tp.d1 / (1.0 + w * w * w);
}

inline double cornering_stiffness(double fz, const TireParams& tp, double mass, double g) {
  const double c1 = tp.b1 * tp.c1 * tp.d1 / (4.0 * (1.0 - std::exp(-tp.c2 / 4.0)));
  return c1 * mass * g * (1.0 - std::exp(-tp.c2 * fz / (mass * g)));
}

inline double magic_shape(double sc, double c1, double e1) {
  const double a = sc / c1;
  return std::sin(c1 * std::atan(a * (1.0 - e1) + e1 * std::atan(a)));
}

/// Combined-slip Magic Formula. mass is the whole vehicle mass.
inline TireForce magic_formula(double lambda, double alpha, double fz, const TireParams& tp,
                               double mass, double g) {
  if (fz <= 0.0) return {};
  const double sx = lambda;
  const double sy = std::tan(alpha);
  const double norm = std::hypot(sx, sy);
  if (norm == 0.0) return {};
  const double fp = peak_force(fz, tp, mass, g);
  const double sc = cornering_stiffness(fz, tp, mass, g) * norm / fp;
  const double f = fp * magic_shape(sc, tp.c1, tp.e1);
  return {f * sx / norm, f * sy / norm};
}

}  // namespace rdeepc::plant

#endif  // RDEEPC_PLANT_TIRE_HPP_
