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

#ifndef RDEEPC_PLANT_PARAMS_HPP_
#define RDEEPC_PLANT_PARAMS_HPP_

#include <cmath>
#include <stdexcept>
#include <string>

#include "rdeepc/util/config.hpp"

namespace rdeepc::plant {

/// Chassis parameters, SI units. The sprung mass rolls about the
/// undercarriage CG, which sits h_uc above the ground.
struct VehicleParams {
  double m_sm = 1350.0;      // sprung mass
  double m_uc = 250.0;       // undercarriage mass
  double h_sm = 1.1;         // sprung CG above the roll pivot
  double h_uc = 0.5;         // roll pivot (undercarriage CG) above ground
  double i_xx_sm = 600.0;    // sprung-mass roll inertia
  double i_zz = 2600.0;      // yaw inertia
  double k_s = 1.6e5;        // roll stiffness
  double d_s = 9000.0;       // roll damping
  double dk_ss = 0.0;        // differential roll stiffness
  double dd_ss = 0.0;        // differential roll damping
  double l_w = 1.55;         // track width
  double l_f = 1.15;         // CG to front axle
  double l_r = 1.55;         // CG to rear axle
  double r_w = 0.32;         // wheel radius
  double i_w = 1.2;          // wheel spin inertia
  double g = 9.81;
  double steering_ratio = 16.0;    // steering-wheel angle / road-wheel angle
  double front_roll_share = 0.55;  // fraction of suspension roll moment on the front axle
  double drag_area = 0.45;         // 0.5 * rho * Cd * A  [kg/m]
  double rolling_resistance = 0.012;

  double mass() const { return m_sm + m_uc; }
  double wheelbase() const { return l_f + l_r; }
  /// CG height of the whole vehicle with the body upright.
  double static_cg_height() const { return h_uc + m_sm * h_sm / mass(); }
  /// Steady-state CG height including suspension roll compliance.
  double effective_cg_height() const {
    const double k = k_s * (1.0 - dk_ss * dk_ss);
    return h_uc + (m_sm * h_sm / mass()) * k / (k - m_sm * g * h_sm);
  }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("VehicleParams: ") + name + " must be positive");
      }
    };
    positive(m_sm, "m_sm");
    positive(m_uc, "m_uc");
    positive(h_sm, "h_sm");
    positive(h_uc, "h_uc");
    positive(i_xx_sm, "i_xx_sm");
    positive(i_zz, "i_zz");
    positive(k_s, "k_s");
    positive(d_s, "d_s");
    positive(l_w, "l_w");
    positive(l_f, "l_f");
    positive(l_r, "l_r");
    positive(r_w, "r_w");
    positive(i_w, "i_w");
    positive(g, "g");
    positive(steering_ratio, "steering_ratio");
    if (!(dk_ss >= 0.0 && dk_ss < 1.0) || !(dd_ss >= 0.0 && dd_ss < 1.0)) {
      throw std::invalid_argument("VehicleParams: differential roll terms must lie in [0, 1)");
    }
    if (!(front_roll_share >= 0.0 && front_roll_share <= 1.0)) {
      throw std::invalid_argument("VehicleParams: front_roll_share must lie in [0, 1]");
    }
    if (!(drag_area >= 0.0) || !(rolling_resistance >= 0.0)) {
      throw std::invalid_argument("VehicleParams: resistance coefficients must be nonnegative");
    }
    if (k_s * (1.0 - dk_ss * dk_ss) <= m_sm * g * h_sm) {
      throw std::invalid_argument("VehicleParams: roll stiffness below the gravitational roll gradient");
    }
  }
};

struct TireParams {
  double b1 = 8.0;
  double c1 = 1.6;
  double d1 = 0.85;
  double e1 = 0.2;
  double c2 = 3.0;
  double mu_nominal = 0.85;  // road friction the shape coefficients describe

  void validate() const {
    if (!(b1 > 0.0) || !(c1 > 0.0) || !(d1 > 0.0) || !(c2 > 0.0) || !(mu_nominal > 0.0)) {
      throw std::invalid_argument("TireParams: B1, C1, D1, c2 and mu_nominal must be positive");
    }
    if (!std::isfinite(e1) || e1 > 1.0) throw std::invalid_argument("TireParams: E1 must be <= 1");
  }

  /// Peak coefficient rescaled to a different road friction.
  TireParams on_road(double mu) const {
    TireParams t = *this;
    t.d1 = d1 * mu / mu_nominal;
    return t;
  }
};

inline VehicleParams vehicle_params_from(const util::Config& c) {
  VehicleParams p;
  p.m_sm = c.get_double("m_sm", p.m_sm);
  p.m_uc = c.get_double("m_uc", p.m_uc);
  p.h_sm = c.get_double("h_sm", p.h_sm);
  p.h_uc = c.get_double("h_uc", p.h_uc);
  p.i_xx_sm = c.get_double("i_xx_sm", p.i_xx_sm);
  p.i_zz = c.get_double("i_zz", p.i_zz);
  p.k_s = c.get_double("k_s", p.k_s);
  p.d_s = c.get_double("d_s", p.d_s);
  p.dk_ss = c.get_double("dk_ss", p.dk_ss);
  p.dd_ss = c.get_double("dd_ss", p.dd_ss);
  p.l_w = c.get_double("l_w", p.l_w);
  p.l_f = c.get_double("l_f", p.l_f);
  p.l_r = c.get_double("l_r", p.l_r);
  p.r_w = c.get_double("r_w", p.r_w);
  p.i_w = c.get_double("i_w", p.i_w);
  p.g = c.get_double("g", p.g);
  p.steering_ratio = c.get_double("steering_ratio", p.steering_ratio);
  p.front_roll_share = c.get_double("front_roll_share", p.front_roll_share);
  p.drag_area = c.get_double("drag_area", p.drag_area);
  p.rolling_resistance = c.get_double("rolling_resistance", p.rolling_resistance);
  p.validate();
  return p;
}

inline TireParams tire_params_from(const util::Config& c) {
  TireParams t;
  t.b1 = c.get_double("tire_b1", t.b1);
  t.c1 = c.get_double("tire_c1", t.c1);
  t.d1 = c.get_double("tire_d1", t.d1);
  t.e1 = c.get_double("tire_e1", t.e1);
  t.c2 = c.get_double("tire_c2", t.c2);
  t.mu_nominal = c.get_double("tire_mu_nominal", t.mu_nominal);
  t.validate();
  return t;
}

}  // namespace rdeepc::plant

#endif  // RDEEPC_PLANT_PARAMS_HPP_
