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

#ifndef RDEEPC_HARNESS_SIMULATION_HPP_
#define RDEEPC_HARNESS_SIMULATION_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdeepc/control/controller.hpp"
#include "rdeepc/data/excitation.hpp"
#include "rdeepc/data/trajectory_log.hpp"
#include "rdeepc/harness/scenario.hpp"
#include "rdeepc/plant/driver.hpp"
#include "rdeepc/plant/vehicle.hpp"

namespace rdeepc::harness {

/// One controller tick.  Plant quantities are sampled at the start of the
/// tick, before the tick's input acts.
struct TickRecord {
  double t = 0.0;
  double delta_f_deg = 0.0;    // applied steering-wheel angle
  double vx_kmh_cmd = 0.0;     // applied target speed
  double delta_ref_deg = 0.0;  // driver-model reference
  double v_ref_kmh = 0.0;
  double ltr_ref = 0.0;
  double vx = 0.0, vy = 0.0, r = 0.0, phi = 0.0, p = 0.0;
  double ltr = 0.0;
  std::array<double, 4> fz{};
  double x = 0.0, y = 0.0, distance = 0.0;
  control::StepDiagnostics diag;
  bool has_diag = false;
};

struct RunLog {
  std::string scenario;
  std::string controller;
  std::vector<TickRecord> ticks;
  bool rolled_over = false;
  double rollover_time = std::numeric_limits<double>::quiet_NaN();
  double sample_time = 0.01;
  std::vector<std::string> warnings;
};

inline TickRecord sample_plant(const plant::Vehicle& veh, double t) {
  TickRecord rec;
  rec.t = t;
  const auto& s = veh.state();
  const auto& o = veh.outputs();
  rec.vx = s.vx;
  rec.vy = s.vy;
  rec.r = s.r;
  rec.phi = s.phi;
  rec.p = s.p;
  rec.ltr = o.ltr;
  rec.fz = {o.loads.fl, o.loads.fr, o.loads.rl, o.loads.rr};
  rec.x = s.x;
  rec.y = s.y;
  rec.distance = s.distance;
  return rec;
}

inline int tick_count(double duration, double ts) { return static_cast<int>(std::lround(duration / ts)); }

/// Closed-loop run of one controller (nullptr: the driver model alone).
/// Rollover ends the run early; everything up to it is kept.
inline RunLog run_closed_loop(const ScenarioConfig& sc, control::PredictiveController* ctrl,
                              const std::string& label) {
  const VehicleSetup vs = sc.vehicle();
  const plant::TrackGeometry track = sc.track();
  plant::Vehicle veh(vs.params, vs.tires, sc.terrain());
  veh.reset(plant::VehicleState::cruising(sc.initial_speed_kmh / 3.6, vs.params.r_w));
  plant::DriverModel driver(vs.driver, vs.params);
  plant::SpeedGovernor governor(vs.governor, vs.params);
  governor.preset_for_cruise(sc.initial_speed_kmh / 3.6);

  RunLog log;
  log.scenario = sc.name;
  log.controller = label;
  log.sample_time = sc.sample_time;
  const int steps = tick_count(sc.duration_s, sc.sample_time);
  log.ticks.reserve(static_cast<size_t>(steps));
  const Eigen::VectorXd y_ref = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd u_ref(2), u(2), y(1);
  for (int k = 0; k < steps; ++k) {
    TickRecord rec = sample_plant(veh, k * sc.sample_time);
    y[0] = rec.ltr;
    u_ref << driver.steer(veh.state(), track, sc.sample_time), sc.v_ref_kmh;
    if (ctrl != nullptr) {
      const control::StepResult res = ctrl->step(u_ref, y_ref);
      u = res.input;
      rec.diag = res.diagnostics;
      rec.has_diag = !res.diagnostics.bootstrap;
      if (res.diagnostics.fallback) {
        log.warnings.push_back("t=" + std::to_string(rec.t) + ": solver " +
                               qp::to_string(res.diagnostics.status) + ", previous input held");
      }
    } else {
      u = u_ref;
    }
    rec.delta_f_deg = u[0];
    rec.vx_kmh_cmd = u[1];
    rec.delta_ref_deg = u_ref[0];
    rec.v_ref_kmh = u_ref[1];
    rec.ltr_ref = y_ref[0];
    log.ticks.push_back(rec);

    plant::PlantInput in;
    in.steering_wheel_deg = u[0];
    in.torque = governor.torques(veh.state(), u[1], sc.sample_time);
    veh.advance(in, sc.sample_time, sc.substeps);
    if (ctrl != nullptr) ctrl->observe(u, y);
    if (veh.rolled_over()) {
      log.rolled_over = true;
      log.rollover_time = (k + 1) * sc.sample_time;
      break;
    }
  }
  return log;
}

/// Driver-model run with white noise added to both input channels; the
/// applied (noisy) inputs and the LTR are recorded.
inline data::TrajectoryLog collect_data(const ScenarioConfig& sc, const CollectionSetup& cs) {
  const VehicleSetup vs = sc.vehicle();
  const plant::TrackGeometry track = plant::track_from(util::Config::load(cs.track_file));
  const plant::TerrainProfile terrain = cs.terrain_file.empty()
                                            ? plant::TerrainProfile(vs.tires.mu_nominal)
                                            : plant::terrain_from(util::Config::load(cs.terrain_file));
  plant::Vehicle veh(vs.params, vs.tires, terrain);
  veh.reset(plant::VehicleState::cruising(cs.speed_kmh / 3.6, vs.params.r_w));
  plant::DriverModel driver(vs.driver, vs.params);
  plant::SpeedGovernor governor(vs.governor, vs.params);
  governor.preset_for_cruise(cs.speed_kmh / 3.6);
  data::ExcitationSource noise({cs.excitation_std, cs.seed});
  if (cs.excitation_std.size() != 2) throw std::invalid_argument("collect: two excitation channels required");

  data::TrajectoryLog log;
  log.sample_time = sc.sample_time;
  log.u.resize(2, cs.samples);
  log.y.resize(1, cs.samples);
  for (int k = 0; k < cs.samples; ++k) {
    log.y(0, k) = veh.outputs().ltr;
    const Eigen::VectorXd d = noise.next();
    const double delta = driver.steer(veh.state(), track, sc.sample_time) + d[0];
    const double v_cmd = cs.speed_kmh + d[1];
    log.u(0, k) = delta;
    log.u(1, k) = v_cmd;
    plant::PlantInput in;
    in.steering_wheel_deg = delta;
    in.torque = governor.torques(veh.state(), v_cmd, sc.sample_time);
    veh.advance(in, sc.sample_time, sc.substeps);
    if (veh.rolled_over()) {
      throw std::runtime_error("collect: vehicle rolled over at t=" + std::to_string((k + 1) * sc.sample_time) +
                               " s; lower the collection speed or excitation");
    }
  }
  log.validate();
  return log;
}

}  // namespace rdeepc::harness

#endif  // RDEEPC_HARNESS_SIMULATION_HPP_
