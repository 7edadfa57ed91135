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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rdeepc/plant/driver.hpp"
#include "rdeepc/plant/track.hpp"
#include "rdeepc/plant/vehicle.hpp"

namespace rdeepc::plant {
namespace {

constexpr double kPi = std::numbers::pi;

// Roll angle where the suspension moment balances the sprung-mass moment in
// steady cornering, by bisection on the equilibrium residual.
double steady_roll_angle(double ay, const VehicleParams& vp) {
  auto residual = [&](double phi) {
    return vp.k_s * std::tan(phi) - vp.m_sm * vp.h_sm * (ay + vp.g * std::sin(phi));
  };
  double lo = ay >= 0.0 ? 0.0 : -0.7, hi = ay >= 0.0 ? 0.7 : 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0) == (residual(hi) > 0.0) ? hi = mid : lo = mid;
  }
  return 0.5 * (lo + hi);
}

TrackGeometry three_turn_track() {
  return TrackGeometry({{120, 0}, {120, 260}, {100, 0}, {110, -230}, {120, 0}, {130, 150}, {320, 0}}, 35.0);
}

struct LoopResult {
  std::vector<double> ltr, steer;
  bool rolled_over = false;
  double rollover_distance = 0.0;
  VehicleState final_state;
};

LoopResult drive(const VehicleParams& vp, const TrackGeometry& track, double v_kmh, double seconds) {
  Vehicle veh(vp, TireParams{}, TerrainProfile(0.85));
  veh.reset(VehicleState::cruising(v_kmh / 3.6, vp.r_w));
  DriverGains dg;
  dg.kp = 4.0;
  DriverModel driver(dg, vp);
  SpeedGovernor gov(GovernorGains{}, vp);
  gov.preset_for_cruise(v_kmh / 3.6);
  LoopResult out;
  for (int k = 0; k < static_cast<int>(seconds / 0.01 + 0.5); ++k) {
    PlantInput in;
    in.steering_wheel_deg = driver.steer(veh.state(), track, 0.01);
    in.torque = gov.torques(veh.state(), v_kmh, 0.01);
    veh.advance(in, 0.01, 10);
    out.ltr.push_back(veh.outputs().ltr);
    out.steer.push_back(in.steering_wheel_deg);
    if (veh.rolled_over()) {
      out.rolled_over = true;
      out.rollover_distance = veh.state().distance;
      break;
    }
  }
  out.final_state = veh.state();
  return out;
}

TEST(TireSlip, FreeRollingHasNoSlip) {
  VehicleParams vp;
  const VehicleState s = VehicleState::cruising(20.0, vp.r_w);
  for (int w = 0; w < 4; ++w) {
    const TireSlip sl = tire_slip(s, w, 0.0, vp);
    EXPECT_NEAR(sl.lambda, 0.0, 1e-15);
    EXPECT_NEAR(sl.alpha, 0.0, 1e-15);
  }
}

TEST(TireSlip, LockedWheelIsMinusOne) {
  VehicleParams vp;
  VehicleState s = VehicleState::cruising(15.0, vp.r_w);
  s.omega[kRearLeft] = 0.0;
  EXPECT_DOUBLE_EQ(tire_slip(s, kRearLeft, 0.0, vp).lambda, -1.0);
}

TEST(TireSlip, FrontSlipAngleHandValue) {
  VehicleParams vp;
  vp.l_f = 1.2;
  VehicleState s;
  s.vx = 20.0;
  s.vy = 2.0;
  s.r = 0.1;
  s.omega.fill(20.0 / vp.r_w);
  EXPECT_NEAR(tire_slip(s, kFrontLeft, 0.05, vp).alpha, -0.05560564982340001, 1e-14);
}

TEST(TireSlip, LowSpeedBlendIsContinuous) {
  EXPECT_NEAR(slip_ratio(0.1, 0.0), -1.0, 1e-12);
  EXPECT_NEAR(slip_ratio(0.1 - 1e-12, 0.0), -1.0, 1e-9);
  EXPECT_DOUBLE_EQ(slip_ratio(0.0, 0.0), 0.0);
  EXPECT_NEAR(slip_ratio(0.05, 0.0), -0.5, 1e-12);
}

TEST(MagicFormula, ZeroSlipOrLoadGivesZeroForce) {
  TireParams tp;
  const TireForce a = magic_formula(0.0, 0.0, 4000.0, tp, 1600.0, 9.81);
  EXPECT_EQ(a.fx, 0.0);
  EXPECT_EQ(a.fy, 0.0);
  const TireForce b = magic_formula(0.2, 0.1, 0.0, tp, 1600.0, 9.81);
  EXPECT_EQ(b.fx, 0.0);
  EXPECT_EQ(b.fy, 0.0);
}

TEST(MagicFormula, PureLateralBoundedByPeak) {
  TireParams tp;
  const double fz = 1600.0 * 9.81 / 4.0;
  const double fp = peak_force(fz, tp, 1600.0, 9.81);
  EXPECT_NEAR(fp, tp.d1 * fz, 1e-4 * fz);  // load sensitivity nearly cancels at a quarter of the weight
  double largest = 0.0;
  for (double a = -1.2; a <= 1.2; a += 0.001) {
    const TireForce f = magic_formula(0.0, a, fz, tp, 1600.0, 9.81);
    EXPECT_EQ(f.fx, 0.0);
    EXPECT_LE(std::abs(f.fy), fp * (1.0 + 1e-12));
    largest = std::max(largest, std::abs(f.fy));
  }
  EXPECT_GT(largest, 0.99 * fp);
  EXPECT_GT(magic_formula(0.0, 0.1, fz, tp, 1600.0, 9.81).fy, 0.0);
}

TEST(MagicFormula, CombinedSlipNeverExceedsPeak) {
  TireParams tp;
  for (double fz = 500.0; fz <= 12000.0; fz += 1500.0) {
    const double fp = peak_force(fz, tp, 1600.0, 9.81);
    for (double l = -1.0; l <= 1.0; l += 0.05)
      for (double a = -0.8; a <= 0.8; a += 0.05) {
        const TireForce f = magic_formula(l, a, fz, tp, 1600.0, 9.81);
        ASSERT_LE(std::hypot(f.fx, f.fy), fp * (1.0 + 1e-12));
      }
  }
}

TEST(MagicFormula, SmallSlipSlopeIsCorneringStiffness) {
  TireParams tp;
  const double fz = 3500.0, h = 1e-7;
  const double slope = magic_formula(0.0, h, fz, tp, 1600.0, 9.81).fy / std::tan(h);
  EXPECT_NEAR(slope / cornering_stiffness(fz, tp, 1600.0, 9.81), 1.0, 1e-6);
}

TEST(Ltr, Arithmetic) {
  EXPECT_EQ(ltr({2000, 2000, 2000, 2000}, 8000.0 / 9.81, 9.81), 0.0);
  EXPECT_DOUBLE_EQ(ltr({0, 4000, 0, 4000}, 8000.0 / 9.81, 9.81), 1.0);
  EXPECT_DOUBLE_EQ(ltr({1500, 2500, 1500, 2500}, 8000.0 / 9.81, 9.81), 0.25);
}

TEST(VerticalLoads, SymmetricAtRest) {
  VehicleParams vp;
  const WheelLoads w = vertical_loads(VehicleState{}, 0.0, vp);
  EXPECT_DOUBLE_EQ(w.fl, w.fr);
  EXPECT_DOUBLE_EQ(w.rl, w.rr);
  EXPECT_NEAR(w.fl / w.rl, vp.l_r / vp.l_f, 1e-12);
}

TEST(VerticalLoads, LiftOffAtCriticalAcceleration) {
  VehicleParams vp;
  const double a_lift = vp.g * vp.l_w / (2.0 * vp.effective_cg_height());
  VehicleState s;
  s.phi = steady_roll_angle(a_lift, vp);
  const LoadDetail d = vertical_load_detail(s, a_lift, vp, vp.g);
  const double inner = d.unclamped.fl + d.unclamped.rl;
  EXPECT_LT(std::abs(inner) / (vp.mass() * vp.g), 0.02);
}

TEST(VerticalLoads, SmallAccelerationMatchesSteadyFormula) {
  VehicleParams vp;
  for (double ay : {0.3, 1.0, 2.0, -1.5}) {
    VehicleState s;
    s.phi = steady_roll_angle(ay, vp);
    const double sim = ltr(vertical_loads(s, ay, vp), vp.mass(), vp.g);
    const double ref = 2.0 * vp.effective_cg_height() * ay / (vp.g * vp.l_w);
    EXPECT_NEAR(sim / ref, 1.0, 0.02) << "ay " << ay;
  }
}

TEST(VerticalLoads, ConservationAndClamping) {
  VehicleParams vp;
  for (double ay : {0.0, 3.0, 6.0, 9.0, -9.0}) {
    VehicleState s;
    s.phi = 0.1 * ay / 9.0;
    s.p = 0.2;
    const LoadDetail d = vertical_load_detail(s, ay, vp, vp.g);
    const double n = vp.mass() * vp.g;
    EXPECT_NEAR(d.unclamped.total(), n, 1e-9 * n);
    EXPECT_NEAR(d.clamped.total(), n, 1e-9 * n);
    for (int w = 0; w < 4; ++w) EXPECT_GE(d.clamped[w], 0.0);
    const bool side_off = (d.clamped.fl == 0.0 && d.clamped.rl == 0.0) || (d.clamped.fr == 0.0 && d.clamped.rr == 0.0);
    const double l = ltr(d.clamped, vp.mass(), vp.g);
    if (side_off) EXPECT_NEAR(std::abs(l), 1.0, 1e-12);
    else EXPECT_LT(std::abs(l), 1.0);
  }
}

TEST(SteadyStateLtr, OracleValues) {
  VehicleParams vp;
  EXPECT_EQ(steady_state_ltr(0.0, 100.0, vp), 0.0);
  const double r = 120.0;
  const double v = std::sqrt(vp.g * vp.l_w * r / (2.0 * vp.effective_cg_height()));
  EXPECT_NEAR(steady_state_ltr(v, r, vp), 1.0, 1e-12);
  EXPECT_THROW(steady_state_ltr(10.0, 0.0, vp), std::invalid_argument);
}

TEST(Dynamics, StraightDrivingIsBalanced) {
  VehicleParams vp;
  const VehicleState s = VehicleState::cruising(25.0, vp.r_w);
  const Derivative d = dynamics_rhs(s, {}, TerrainProfile(0.85), vp, TireParams{});
  EXPECT_NEAR(d.dx[1], 0.0, 1e-12);
  EXPECT_NEAR(d.dx[2], 0.0, 1e-12);
  EXPECT_NEAR(d.dx[4], 0.0, 1e-12);
  EXPECT_NEAR(d.out.ltr, 0.0, 1e-12);
}

TEST(Dynamics, SteeringImpulseRollsAgainstRestoringMoment) {
  VehicleParams vp;
  VehicleState s = VehicleState::cruising(25.0, vp.r_w);
  s.vy = -0.3;
  s.r = 0.1;
  s.phi = 0.01;
  PlantInput in;
  in.steering_wheel_deg = 40.0;
  const Derivative d = dynamics_rhs(s, in, TerrainProfile(0.85), vp, TireParams{});
  const double l_t = suspension_roll_moment(s.phi, s.p, vp);
  EXPECT_LT(l_t, 0.0);
  EXPECT_GT(d.dx[4], 0.0);
}

TEST(Dynamics, SteadyCorneringRollMatchesEquilibrium) {
  VehicleParams vp;
  const TrackGeometry circle({{50.0, 0.0}, {900.0, 180.0}});
  const LoopResult res = drive(vp, circle, 80.0, 25.0);
  ASSERT_FALSE(res.rolled_over);
  const VehicleState& s = res.final_state;
  EXPECT_NEAR(s.p, 0.0, 1e-3);
  const double ay = s.vx * s.r;
  EXPECT_NEAR(s.phi, steady_roll_angle(ay, vp), 5e-4);
}

TEST(Step, ZeroStateIsFixedPoint) {
  VehicleParams vp;
  const VehicleState s{};
  const VehicleState n = rk4_step(s, {}, 0.001, TerrainProfile(0.85), vp, TireParams{});
  EXPECT_EQ(n.to_vector(), s.to_vector());
}

TEST(Step, FourthOrderConvergence) {
  VehicleParams vp;
  TireParams tp;
  const TerrainProfile flat(0.85);
  VehicleState s0 = VehicleState::cruising(25.0, vp.r_w);
  PlantInput in;
  in.steering_wheel_deg = 25.0;
  in.torque.fill(150.0);
  auto run = [&](double dt) {
    VehicleState s = s0;
    const int n = static_cast<int>(std::lround(0.5 / dt));
    for (int i = 0; i < n; ++i) s = rk4_step(s, in, dt, flat, vp, tp);
    return s.to_vector();
  };
  const auto ref = run(0.5 / 2000.0);
  const double e1 = (run(0.5 / 100.0) - ref).norm();
  const double e2 = (run(0.5 / 200.0) - ref).norm();
  const double order = std::log2(e1 / e2);
  EXPECT_GE(order, 3.8) << "errors " << e1 << " " << e2;
}

TEST(Step, ThreeTurnRunStaysFinite) {
  VehicleParams vp;
  const LoopResult res = drive(vp, three_turn_track(), 105.0, 35.0);
  for (double l : res.ltr) ASSERT_TRUE(std::isfinite(l));
  EXPECT_TRUE(res.final_state.finite());
}

TEST(Driver, CenteredOnStraightGivesZero) {
  VehicleParams vp;
  const TrackGeometry straight({{500.0, 0.0}});
  const VehicleState s = VehicleState::cruising(25.0, vp.r_w);
  EXPECT_NEAR(driver_steering(s, straight, DriverGains{}, vp), 0.0, 1e-12);
}

TEST(Driver, SteersBackTowardPath) {
  VehicleParams vp;
  const TrackGeometry straight({{500.0, 0.0}});
  VehicleState s = VehicleState::cruising(25.0, vp.r_w);
  s.y = 1.0;  // left of the path
  EXPECT_LT(driver_steering(s, straight, DriverGains{}, vp), 0.0);
  s.y = -1.0;
  EXPECT_GT(driver_steering(s, straight, DriverGains{}, vp), 0.0);
}

TEST(Driver, DriverOnlySedanRollsOverAtFinalTurn) {
  VehicleParams vp;
  const TrackGeometry track = three_turn_track();
  const LoopResult res = drive(vp, track, 105.0, 35.0);
  ASSERT_TRUE(res.rolled_over);
  const double final_turn_start = 120 + 120 + 100 + 110 + 120;
  EXPECT_GT(res.rollover_distance, final_turn_start);
}

TEST(Track, ProjectionRecoversPose) {
  const TrackGeometry track = three_turn_track();
  for (double s = 5.0; s < track.length(); s += 37.0) {
    const PathPose p = track.pose_at(s);
    const double nx = -std::sin(p.heading), ny = std::cos(p.heading);
    const Projection pr = track.project(p.x + 0.7 * nx, p.y + 0.7 * ny);
    EXPECT_NEAR(pr.s, s, 1e-6);
    EXPECT_NEAR(pr.offset, 0.7, 1e-9);
  }
}

TEST(Governor, HoldsCruiseSpeed) {
  VehicleParams vp;
  Vehicle veh(vp, TireParams{}, TerrainProfile(0.85));
  veh.reset(VehicleState::cruising(100.0 / 3.6, vp.r_w));
  SpeedGovernor gov(GovernorGains{}, vp);
  for (int k = 0; k < 500; ++k) {
    PlantInput in;
    in.torque = gov.torques(veh.state(), 100.0, 0.01);
    veh.advance(in, 0.01, 10);
  }
  EXPECT_NEAR(veh.state().vx * 3.6, 100.0, 0.05);
}

TEST(Governor, BrakesWhenAboveTarget) {
  VehicleParams vp;
  SpeedGovernor gov(GovernorGains{}, vp);
  const auto t = gov.torques(VehicleState::cruising(30.0, vp.r_w), 90.0, 0.01);
  for (double x : t) EXPECT_LT(x, 0.0);
  EXPECT_EQ(t[0], t[1]);
  EXPECT_EQ(t[2], t[3]);
}

TEST(Governor, StepResponseIsMonotoneWithoutOvershoot) {
  VehicleParams vp;
  Vehicle veh(vp, TireParams{}, TerrainProfile(0.85));
  veh.reset(VehicleState::cruising(100.0 / 3.6, vp.r_w));
  SpeedGovernor gov(GovernorGains{}, vp);
  gov.preset_for_cruise(100.0 / 3.6);
  double prev = veh.state().vx * 3.6, peak = prev;
  bool monotone = true;
  for (int k = 0; k < 1000; ++k) {
    PlantInput in;
    in.torque = gov.torques(veh.state(), 105.0, 0.01);
    veh.advance(in, 0.01, 10);
    const double v = veh.state().vx * 3.6;
    if (v < prev - 1e-6 && v < 104.0) monotone = false;
    peak = std::max(peak, v);
    prev = v;
  }
  EXPECT_TRUE(monotone);
  EXPECT_LT(peak, 107.0);
  EXPECT_NEAR(prev, 105.0, 0.3);
}

TEST(Symmetry, MirroredTrackMirrorsTrajectory) {
  VehicleParams vp;
  const TrackGeometry track({{60, 0}, {150, 250}, {80, 0}, {120, -200}, {100, 0}});
  const LoopResult a = drive(vp, track, 90.0, 15.0);
  const LoopResult b = drive(vp, mirrored(track), 90.0, 15.0);
  ASSERT_EQ(a.ltr.size(), b.ltr.size());
  for (size_t i = 0; i < a.ltr.size(); ++i) {
    ASSERT_NEAR(a.ltr[i], -b.ltr[i], 1e-6) << "sample " << i;
    ASSERT_NEAR(a.steer[i], -b.steer[i], 1e-6) << "sample " << i;
  }
}

TEST(Lift, RolledOverRunReachesUnitLtrFirst) {
  VehicleParams vp;
  const LoopResult res = drive(vp, three_turn_track(), 105.0, 35.0);
  ASSERT_TRUE(res.rolled_over);
  double peak = 0.0;
  for (double l : res.ltr) peak = std::max(peak, std::abs(l));
  EXPECT_GE(peak, 1.0);
}

}  // namespace
}  // namespace rdeepc::plant
