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

#ifndef RDEEPC_PLANT_STATE_HPP_
#define RDEEPC_PLANT_STATE_HPP_

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace rdeepc::plant {

enum WheelId : int { kFrontLeft = 0, kFrontRight = 1, kRearLeft = 2, kRearRight = 3 };

inline constexpr bool is_front(int w) { return w == kFrontLeft || w == kFrontRight; }
inline constexpr bool is_left(int w) { return w == kFrontLeft || w == kRearLeft; }

/// Body frame: x forward, y left. Positive roll phi moves the sprung mass
/// to the right, so a left turn (r > 0) produces phi > 0 and LTR > 0.
struct VehicleState {
  double vx = 0.0;
  double vy = 0.0;
  double r = 0.0;
  double phi = 0.0;  // suspension roll relative to the undercarriage
  double p = 0.0;
  std::array<double, 4> omega{};  // wheel spin, fl fr rl rr
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double distance = 0.0;  // arclength travelled, indexes the terrain
  // Rigid rotation of the whole vehicle about the outer contact line once
  // one side has lifted; zero while all wheels are on the ground.
  double lift = 0.0;
  double lift_rate = 0.0;

  static constexpr int kSize = 16;
  using Vector = Eigen::Matrix<double, kSize, 1>;

  Vector to_vector() const {
    Vector v;
    v << vx, vy, r, phi, p, omega[0], omega[1], omega[2], omega[3], x, y, psi, distance, lift,
        lift_rate, 0.0;
    return v;
  }

  static VehicleState from_vector(const Vector& v) {
    VehicleState s;
    s.vx = v[0];
    s.vy = v[1];
    s.r = v[2];
    s.phi = v[3];
    s.p = v[4];
    for (int i = 0; i < 4; ++i) s.omega[static_cast<size_t>(i)] = v[5 + i];
    s.x = v[9];
    s.y = v[10];
    s.psi = v[11];
    s.distance = v[12];
    s.lift = v[13];
    s.lift_rate = v[14];
    return s;
  }

  /// Body roll relative to the road surface.
  double total_roll() const { return phi + lift; }
  double speed() const { return std::hypot(vx, vy); }
  bool finite() const { return to_vector().allFinite(); }

  /// Straight-line state at speed v with free-rolling wheels.
  static VehicleState cruising(double v, double wheel_radius) {
    VehicleState s;
    s.vx = v;
    s.omega.fill(v / wheel_radius);
    return s;
  }
};

}  // namespace rdeepc::plant

#endif  // RDEEPC_PLANT_STATE_HPP_
