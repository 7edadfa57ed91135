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

#ifndef RDEEPC_PLANT_VEHICLE_HPP_
#define RDEEPC_PLANT_VEHICLE_HPP_

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rdeepc/plant/params.hpp"
#include "rdeepc/plant/state.hpp"
#include "rdeepc/plant/terrain.hpp"
#include "rdeepc/plant/tire.hpp"

namespace rdeepc::plant {

/// Total roll beyond which a run is declared rolled over.
inline constexpr double kRolloverRoll = 0.5;

struct WheelLoads {
  double fl = 0.0, fr = 0.0, rl = 0.0, rr = 0.0;

  double left() const { return fl + rl; }
  double right() const { return fr + rr; }
  double total() const { return fl + fr + rl + rr; }
  double operator[](int w) const {
    switch (w) {
      case kFrontLeft: return fl;
      case kFrontRight: return fr;
      case kRearLeft: return rl;
      default: return rr;
    }
  }
};

inline double ltr(const WheelLoads& loads, double mass, double g) {
  return (loads.right() - loads.left()) / (mass * g);
}

/// Suspension roll moment acting on the sprung mass.
inline double suspension_roll_moment(double phi, double p, const VehicleParams& vp) {
  return -vp.k_s * (1.0 - vp.dk_ss * vp.dk_ss) * std::tan(phi) -
         vp.d_s * (1.0 - vp.dd_ss * vp.dd_ss) * p * std::cos(phi) -
         vp.mass() * vp.g * (vp.dk_ss + vp.dd_ss);
}

struct LoadDetail {
  WheelLoads clamped;
  WheelLoads unclamped;
  double transfer_moment = 0.0;  // moment the ground loads must supply about the centerline
};

/// Vertical loads with all wheels in contact. lateral_accel is the tire
/// lateral force over total mass; normal_accel the gravity component normal
/// to the road plus vertical acceleration.
inline LoadDetail vertical_load_detail(const VehicleState& s, double lateral_accel,
                                       const VehicleParams& vp, double normal_accel) {
  const double m = vp.mass();
  const double n = m * normal_accel;
  const double front_frac = vp.l_r / vp.wheelbase();
  const double nf = n * front_frac;
  const double nr = n - nf;
  const double m_geo = m * lateral_accel * vp.h_uc;
  const double m_el = -suspension_roll_moment(s.phi, s.p, vp);

  double df = 2.0 / vp.l_w * (m_geo * front_frac + vp.front_roll_share * m_el);
  double dr = 2.0 / vp.l_w * (m_geo * (1.0 - front_frac) + (1.0 - vp.front_roll_share) * m_el);

  LoadDetail out;
  out.transfer_moment = m_geo + m_el;
  out.unclamped = {0.5 * (nf - df), 0.5 * (nf + df), 0.5 * (nr - dr), 0.5 * (nr + dr)};

  // A lifted inner wheel cannot carry more transfer; the chassis passes the
  // remainder to the other axle.
  auto saturate = [](double& d, double cap) {
    const double c = std::max(cap, 0.0);
    if (std::abs(d) <= c) return 0.0;
    const double excess = d - std::copysign(c, d);
    d = std::copysign(c, d);
    return excess;
  };
  dr += saturate(df, nf);
  df += saturate(dr, nr);
  saturate(df, nf);
  out.clamped = {0.5 * (nf - df), 0.5 * (nf + df), 0.5 * (nr - dr), 0.5 * (nr + dr)};
  return out;
}

inline WheelLoads vertical_loads(const VehicleState& s, double lateral_accel, const VehicleParams& vp) {
  return vertical_load_detail(s, lateral_accel, vp, vp.g).clamped;
}

/// Steady cornering LTR on flat ground: 2 h a / (g l_w) with the
/// compliance-corrected CG height.
inline double steady_state_ltr(double v, double radius, const VehicleParams& vp) {
  if (!(radius > 0.0)) throw std::invalid_argument("steady_state_ltr: radius must be positive");
  return 2.0 * vp.effective_cg_height() * (v * v / radius) / (vp.g * vp.l_w);
}

/// Steering-wheel angle plus per-wheel drive/brake torque, held for a step.
struct PlantInput {
  double steering_wheel_deg = 0.0;
  std::array<double, 4> torque{};
};

struct PlantOutputs {
  WheelLoads loads;
  double ltr = 0.0;
  double lateral_accel = 0.0;
  std::array<TireForce, 4> tire{};
};

struct Derivative {
  VehicleState::Vector dx;
  PlantOutputs out;
};

class RolloverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Whole-vehicle roll inertia about a contact line.
inline double tipping_inertia(const VehicleParams& vp) {
  const double b = 0.5 * vp.l_w;
  const double h = vp.static_cg_height();
  return vp.i_xx_sm + vp.mass() * (b * b + h * h);
}

inline Derivative dynamics_rhs(const VehicleState& s, const PlantInput& in, const TerrainProfile& terrain,
                               const VehicleParams& vp, const TireParams& tp_nominal) {
  const double m = vp.mass();
  const TerrainSample ts = terrain.at(s.distance);
  const TireParams tp = tp_nominal.on_road(ts.mu);
  const double v = s.speed();
  const double delta = in.steering_wheel_deg * std::numbers::pi / 180.0 / vp.steering_ratio;
  const double grade = std::atan(ts.slope);
  const double normal_accel = vp.g * std::cos(ts.bank) * std::cos(grade) + v * v * ts.elevation_dd;
  const double n_total = m * std::max(normal_accel, 0.0);
  const double b = 0.5 * vp.l_w;
  const double h_static = vp.static_cg_height();
  const double i_tip = tipping_inertia(vp);
  const double front_frac = vp.l_r / vp.wheelbase();

  std::array<TireSlip, 4> slip;
  for (int w = 0; w < 4; ++w) slip[static_cast<size_t>(w)] = tire_slip(s, w, is_front(w) ? delta : 0.0, vp);

  std::array<TireForce, 4> force{};
  double fx_body = 0.0, fy_body = 0.0, yaw_moment = 0.0;
  auto tire_forces = [&](const WheelLoads& loads) {
    fx_body = fy_body = yaw_moment = 0.0;
    for (int w = 0; w < 4; ++w) {
      const size_t i = static_cast<size_t>(w);
      force[i] = magic_formula(slip[i].lambda, slip[i].alpha, loads[w], tp, m, vp.g);
      const double d = is_front(w) ? delta : 0.0;
      const double bx = force[i].fx * std::cos(d) - force[i].fy * std::sin(d);
      const double by = force[i].fx * std::sin(d) + force[i].fy * std::cos(d);
      const double px = is_front(w) ? vp.l_f : -vp.l_r;
      const double py = is_left(w) ? b : -b;
      fx_body += bx;
      fy_body += by;
      yaw_moment += px * by - py * bx;
    }
  };

  const double l_t = suspension_roll_moment(s.phi, s.p, vp);
  const bool lifted = s.lift != 0.0 || s.lift_rate != 0.0;
  const double side = s.lift > 0.0 || (s.lift == 0.0 && s.lift_rate > 0.0) ? 1.0 : -1.0;
  WheelLoads loads;
  double lift_acc = 0.0;

  if (!lifted) {
    // Loads depend on the lateral tire force, which depends on the loads.
    double ay = s.vx * s.r;
    for (int it = 0; it < 3; ++it) {
      loads = vertical_load_detail(s, ay, vp, std::max(normal_accel, 0.0)).clamped;
      tire_forces(loads);
      ay = fy_body / m;
    }
    const double transfer = m * ay * vp.h_uc - l_t;
    const double excess = std::abs(transfer) - n_total * b;
    if (excess > 0.0) lift_acc = std::copysign(excess / i_tip, transfer);
  } else {
    // One side airborne: the outer wheels carry the whole normal reaction.
    const double th = side * s.lift;
    const double th_dot = side * s.lift_rate;
    double ay = s.vx * s.r;
    double acc = 0.0;
    for (int it = 0; it < 3; ++it) {
      const double transfer = side * (m * ay * vp.h_uc - l_t);
      acc = (std::cos(th) * (transfer - n_total * b) +
             std::sin(th) * (side * m * ay * b + n_total * h_static)) / i_tip;
      const double z_dd = (b * std::cos(th) - h_static * std::sin(th)) * acc -
                          (b * std::sin(th) + h_static * std::cos(th)) * th_dot * th_dot;
      const double outer = std::max(n_total + m * z_dd, 0.0);
      loads = side > 0.0 ? WheelLoads{0.0, outer * front_frac, 0.0, outer * (1.0 - front_frac)}
                         : WheelLoads{outer * front_frac, 0.0, outer * (1.0 - front_frac), 0.0};
      tire_forces(loads);
      ay = fy_body / m;
    }
    lift_acc = side * acc;
  }

  const double ay = fy_body / m;
  const double i_eff = vp.i_xx_sm + vp.h_sm * vp.h_sm * vp.m_sm * (vp.m_uc / m) * std::cos(s.phi);
  const double g_n = std::max(normal_accel, 0.0);
  const double bank_acc = v * v * ts.bank_dd;
  const double p_dot =
      (vp.h_sm * vp.m_sm * (ay + std::sin(s.total_roll()) * (g_n + vp.h_sm * (vp.m_uc / m) * s.p * s.p)) + l_t) /
          i_eff - bank_acc;

  const double v_sign = std::tanh(s.vx / kLowSpeedGuard);
  const double resist = vp.drag_area * v * s.vx + vp.rolling_resistance * n_total * v_sign;

  VehicleState::Vector dx = VehicleState::Vector::Zero();
  dx[0] = (fx_body - resist - 2.0 * vp.m_sm * vp.h_sm * s.r * s.p * std::cos(s.phi)) / m + s.vy * s.r -
          vp.g * std::sin(grade) * v_sign;
  dx[1] = (fy_body + vp.m_sm * vp.h_sm * (p_dot * std::cos(s.phi) - s.p * s.p * std::sin(s.phi))) / m -
          s.vx * s.r + vp.g * std::sin(ts.bank);
  dx[2] = yaw_moment / vp.i_zz;
  dx[3] = s.p;
  dx[4] = p_dot;
  for (int w = 0; w < 4; ++w) {
    dx[5 + w] = (in.torque[static_cast<size_t>(w)] - vp.r_w * force[static_cast<size_t>(w)].fx) / vp.i_w;
  }
  dx[9] = s.vx * std::cos(s.psi) - s.vy * std::sin(s.psi);
  dx[10] = s.vx * std::sin(s.psi) + s.vy * std::cos(s.psi);
  dx[11] = s.r;
  dx[12] = v;
  dx[13] = s.lift_rate;
  dx[14] = lift_acc;

  Derivative d;
  d.dx = dx;
  d.out.loads = loads;
  d.out.ltr = ltr(loads, m, vp.g);
  d.out.lateral_accel = ay;
  d.out.tire = force;
  return d;
}

/// Fixed-step RK4 with the input held. Handles wheel touchdown after the step.
inline VehicleState rk4_step(const VehicleState& s, const PlantInput& in, double dt,
                             const TerrainProfile& terrain, const VehicleParams& vp,
                             const TireParams& tp) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
  using V = VehicleState::Vector;
  const V x0 = s.to_vector();
  auto f = [&](const V& x) { return dynamics_rhs(VehicleState::from_vector(x), in, terrain, vp, tp).dx; };
  const V k1 = f(x0);
  const V k2 = f(x0 + 0.5 * dt * k1);
  const V k3 = f(x0 + 0.5 * dt * k2);
  const V k4 = f(x0 + dt * k3);
  VehicleState next = VehicleState::from_vector(x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));

  // Lift only ever grows away from zero on the side it started; crossing back
  // is a touchdown and is inelastic.
  const double before = s.lift != 0.0 ? s.lift : s.lift_rate != 0.0 ? s.lift_rate : k1[14];
  if (before == 0.0 || next.lift * before <= 0.0) {
    next.lift = 0.0;
    next.lift_rate = 0.0;
  }
  if (!next.finite()) throw std::runtime_error("vehicle state became non-finite");
  return next;
}

/// Parameters plus mutable state; one instance per simulation thread.
class Vehicle {
 public:
  Vehicle(VehicleParams vp, TireParams tp, TerrainProfile terrain)
      : vp_(vp), tp_(tp), terrain_(std::move(terrain)) {
    vp_.validate();
    tp_.validate();
  }

  void reset(const VehicleState& s) {
    state_ = s;
    outputs_ = dynamics_rhs(state_, {}, terrain_, vp_, tp_).out;
  }

  /// Advances by `duration` using `substeps` RK4 steps with the input held.
  void advance(const PlantInput& in, double duration, int substeps) {
    const double dt = duration / substeps;
    for (int i = 0; i < substeps && !rolled_over_; ++i) {
      state_ = rk4_step(state_, in, dt, terrain_, vp_, tp_);
      if (std::abs(state_.total_roll()) > kRolloverRoll) rolled_over_ = true;
    }
    outputs_ = dynamics_rhs(state_, in, terrain_, vp_, tp_).out;
  }

  const VehicleState& state() const { return state_; }
  const PlantOutputs& outputs() const { return outputs_; }
  bool rolled_over() const { return rolled_over_; }
  const VehicleParams& params() const { return vp_; }
  const TireParams& tires() const { return tp_; }
  const TerrainProfile& terrain() const { return terrain_; }

 private:
  VehicleParams vp_;
  TireParams tp_;
  TerrainProfile terrain_;
  VehicleState state_;
  PlantOutputs outputs_;
  bool rolled_over_ = false;
};

}  // namespace rdeepc::plant

#endif  // RDEEPC_PLANT_VEHICLE_HPP_
