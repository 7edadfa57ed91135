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

#ifndef RDEEPC_PLANT_DRIVER_HPP_
#define RDEEPC_PLANT_DRIVER_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "rdeepc/plant/params.hpp"
#include "rdeepc/plant/state.hpp"
#include "rdeepc/plant/track.hpp"
#include "rdeepc/util/config.hpp"

namespace rdeepc::plant {

struct DriverGains {
  double kp = 6.0;          // deg of steering wheel per m of preview error
  double ki = 0.5;          // deg per m*s
  double kd = 0.8;          // deg*s per m
  double preview_time = 0.7;  // s
  double preview_min = 5.0;   // m
  double limit_deg = 200.0;
  double integral_limit = 20.0;  // m*s
  double feedforward = 1.0;      // share of the kinematic steering for the preview curvature
};

inline DriverGains driver_gains_from(const util::Config& c) {
  DriverGains g;
  g.kp = c.get_double("driver_kp", g.kp);
  g.ki = c.get_double("driver_ki", g.ki);
  g.kd = c.get_double("driver_kd", g.kd);
  g.preview_time = c.get_double("driver_preview_time", g.preview_time);
  g.preview_min = c.get_double("driver_preview_min", g.preview_min);
  g.limit_deg = c.get_double("driver_limit_deg", g.limit_deg);
  g.feedforward = c.get_double("driver_feedforward", g.feedforward);
  return g;
}

/// Path-following PID acting on the lateral error at a preview point ahead of the vehicle.
class DriverModel {
 public:
  explicit DriverModel(DriverGains gains = {}, VehicleParams vp = {}) : gains_(gains), vp_(vp) {}

  void reset() {
    integral_ = 0.0;
    previous_error_ = 0.0;
    primed_ = false;
  }

  /// Preview error, positive when the path lies to the left of the preview
  /// point, and the path curvature there.
  std::pair<double, double> preview(const VehicleState& s, const TrackGeometry& track) const {
    const double d = std::max(gains_.preview_min, gains_.preview_time * s.vx);
    const double px = s.x + d * std::cos(s.psi);
    const double py = s.y + d * std::sin(s.psi);
    const Projection pr = track.project(px, py);
    return {-pr.offset, pr.curvature};
  }

  /// Kinematic steering-wheel angle for a path curvature.
  double kinematic_steer_deg(double curvature) const {
    return gains_.feedforward * vp_.steering_ratio * std::atan(vp_.wheelbase() * curvature) * 180.0 /
           std::numbers::pi;
  }

  /// Steering-wheel command in degrees; dt is the controller period.
  double steer(const VehicleState& s, const TrackGeometry& track, double dt) {
    const auto [e, curvature] = preview(s, track);
    const double de = primed_ ? (e - previous_error_) / dt : 0.0;
    integral_ = std::clamp(integral_ + e * dt, -gains_.integral_limit, gains_.integral_limit);
    previous_error_ = e;
    primed_ = true;
    const double cmd = kinematic_steer_deg(curvature) + gains_.kp * e + gains_.ki * integral_ + gains_.kd * de;
    return std::clamp(cmd, -gains_.limit_deg, gains_.limit_deg);
  }

  const DriverGains& gains() const { return gains_; }

 private:
  DriverGains gains_;
  VehicleParams vp_;
  double integral_ = 0.0;
  double previous_error_ = 0.0;
  bool primed_ = false;
};

/// Single evaluation with fresh integral and derivative state.
inline double driver_steering(const VehicleState& s, const TrackGeometry& track, const DriverGains& gains,
                              const VehicleParams& vp = {}) {
  DriverModel d(gains, vp);
  return d.steer(s, track, 0.01);
}

struct GovernorGains {
  double kp = 2.0;   // (m/s^2) per (m/s)
  double ki = 1.0;   // (m/s^2) per m
  double max_drive_accel = 3.4;
  double max_brake_accel = 7.8;
};

inline GovernorGains governor_gains_from(const util::Config& c) {
  GovernorGains g;
  g.kp = c.get_double("governor_kp", g.kp);
  g.ki = c.get_double("governor_ki", g.ki);
  g.max_drive_accel = c.get_double("governor_max_drive_accel", g.max_drive_accel);
  g.max_brake_accel = c.get_double("governor_max_brake_accel", g.max_brake_accel);
  return g;
}

/// PI speed loop producing equal torque on all four wheels.
class SpeedGovernor {
 public:
  SpeedGovernor(GovernorGains gains, const VehicleParams& vp) : gains_(gains), vp_(vp) {}

  void reset(double integral_accel = 0.0) { integral_ = integral_accel; }

  /// Integral term preset so the loop starts balanced at cruising speed v.
  void preset_for_cruise(double v) {
    integral_ = (vp_.drag_area * v * v + vp_.rolling_resistance * vp_.mass() * vp_.g) / vp_.mass();
  }

  std::array<double, 4> torques(const VehicleState& s, double v_target_kmh, double dt) {
    const double e = v_target_kmh / 3.6 - s.vx;
    const double unsat = gains_.kp * e + integral_ + gains_.ki * e * dt;
    const double accel = std::clamp(unsat, -gains_.max_brake_accel, gains_.max_drive_accel);
    // Conditional integration: freeze the integral while saturated in the same direction.
    if (unsat == accel || (unsat > accel) != (e > 0.0)) integral_ += gains_.ki * e * dt;
    integral_ = std::clamp(integral_, -gains_.max_brake_accel, gains_.max_drive_accel);
    const double inertial_mass = vp_.mass() + 4.0 * vp_.i_w / (vp_.r_w * vp_.r_w);
    const double per_wheel = inertial_mass * vp_.r_w * accel / 4.0;
    std::array<double, 4> t;
    t.fill(per_wheel);
    return t;
  }

  const GovernorGains& gains() const { return gains_; }

 private:
  GovernorGains gains_;
  VehicleParams vp_;
  double integral_ = 0.0;
};

}  // namespace rdeepc::plant

#endif  // RDEEPC_PLANT_DRIVER_HPP_
