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

// Acceptance checks.  Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.  --skip-full skips the full-library DeePC
// run (criterion 3), which dominates the runtime.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracles/box_qp_oracle.hpp"
#include "oracles/lti_oracle.hpp"
#include "oracles/mpc_oracle.hpp"
#include "rdeepc/control/deepc.hpp"
#include "rdeepc/data/library.hpp"
#include "rdeepc/harness/metrics.hpp"
#include "rdeepc/harness/pipeline.hpp"
#include "rdeepc/plant/driver.hpp"
#include "rdeepc/plant/vehicle.hpp"
#include "rdeepc/qp/admm_solver.hpp"
#include "rdeepc/qp/kkt.hpp"

namespace fs = std::filesystem;
using namespace rdeepc;
using Clock = std::chrono::steady_clock;

namespace {

const fs::path kConfigDir = RDEEPC_CONFIG_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

data::TrajectoryLog lti_log(const testing::LtiSystem& sys, std::uint64_t seed, int T) {
  std::mt19937_64 rng(seed);
  data::TrajectoryLog log;
  log.u = testing::gaussian_matrix(rng, sys.m(), T);
  log.y = testing::simulate(sys, log.u, testing::gaussian_matrix(rng, sys.n(), 1));
  return log;
}

// 1
Outcome fundamental_lemma() {
  const auto t0 = Clock::now();
  double worst_member = 0.0, weakest_outsider = 1e300;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 1 + static_cast<int>(seed % 5);
    const testing::LtiSystem sys = testing::random_lti(1000 + seed, n, 2, 1);
    const int L = 15;
    const data::DataLibrary lib = data::partition(lti_log(sys, 2000 + seed, (2 + 1) * (n + L) + 30), 6, L - 6);
    const data::TrajectoryLog fresh = lti_log(sys, 3000 + seed, L);
    worst_member = std::max(worst_member, data::verify_trajectory_membership(lib, fresh.u, fresh.y));
    const testing::LtiSystem other = testing::random_lti(4000 + seed, n, 2, 1);
    const data::TrajectoryLog wrong = lti_log(other, 5000 + seed, L);
    weakest_outsider = std::min(weakest_outsider, data::verify_trajectory_membership(lib, wrong.u, wrong.y));
  }
  const double secs = seconds_since(t0);
  return {worst_member <= 1e-8 && weakest_outsider > 1e-3 && secs < 10.0,
          fmt::format("max member residual {:.2e} (<= 1e-8), min mismatched residual {:.2e} (> 1e-3), {:.2f} s (< 10)",
                      worst_member, weakest_outsider, secs)};
}

// 2
Outcome deepc_equals_mpc() {
  double worst = 0.0;
  for (int n : {2, 3, 4}) {
    const int m = 2, p = 1, t_ini = n + 1, N = 10;
    const testing::LtiSystem sys = testing::random_lti(70 + n, n, m, p);
    const data::DataLibrary lib = data::partition(lti_log(sys, 80 + n, 400), t_ini, N);
    control::PredictiveConfig c;
    c.t_ini = t_ini;
    c.horizon = N;
    c.q_weights = Eigen::VectorXd::Ones(p);
    c.r_weights = Eigen::VectorXd::Constant(m, 0.1);
    c.lambda_g = 0.0;
    c.lambda_y = 0.0;
    c.slack_y = false;
    c.input_box = control::Box::unbounded(m);
    c.output_box = control::Box::unbounded(p);
    c.solver.eps_abs = c.solver.eps_rel = 1e-10;
    c.solver.max_iter = 200000;
    c.solver.polish = true;
    control::DeepcController ctrl(lib, c);
    const Eigen::Vector2d ur(0.2, -0.1);
    const Eigen::VectorXd yr = Eigen::VectorXd::Constant(1, 1.0);
    std::mt19937_64 rng(90 + n);
    Eigen::VectorXd x_d = testing::gaussian_matrix(rng, n, 1), x_o = x_d;
    for (int t = 0; t < 50; ++t) {
      const control::StepResult r = ctrl.step(ur, yr);
      const Eigen::VectorXd u_o =
          r.diagnostics.bootstrap ? Eigen::VectorXd(ur) : testing::batch_lq_first_input(sys, x_o, c, ur, yr);
      worst = std::max(worst, (r.input - u_o).cwiseAbs().maxCoeff());
      ctrl.observe(r.input, sys.C * x_d + sys.D * r.input);
      x_d = sys.A * x_d + sys.B * r.input;
      x_o = sys.A * x_o + sys.B * u_o;
    }
  }
  return {worst <= 1e-6, fmt::format("max input difference over 50 steps, n = 2..4: {:.2e} (<= 1e-6)", worst)};
}

harness::ScenarioConfig scenario(const std::string& name) {
  return harness::load_scenario(kConfigDir / "scenarios" / (name + ".cfg"));
}

std::string brief(const harness::RunMetrics& m) {
  return fmt::format("cost {:.4g}, max|LTR| {:.3f}, {}, mean {:.1f} km/h", m.cost, m.max_abs_ltr,
                     m.rolled_over ? fmt::format("rollover at {:.2f} s", m.rollover_time) : "no rollover",
                     m.mean_speed_kmh);
}

struct SedanRuns {
  harness::RunMetrics driver, rd, lmpc;
  std::optional<harness::RunMetrics> full;
  double full_wall_s = 0.0;
};

SedanRuns sedan_runs(bool with_full) {
  harness::PreparedScenario prep(scenario("sedan-1"));
  SedanRuns r;
  r.driver = harness::compute_metrics(prep.run(harness::ControllerKind::kDriver), prep.config());
  r.rd = harness::compute_metrics(prep.run(harness::ControllerKind::kRdDeepc), prep.config());
  r.lmpc = harness::compute_metrics(prep.run(harness::ControllerKind::kLmpc), prep.config());
  if (with_full) {
    const auto t0 = Clock::now();
    r.full = harness::compute_metrics(prep.run(harness::ControllerKind::kDeepc), prep.config());
    r.full_wall_s = seconds_since(t0);
  }
  return r;
}

// 3
Outcome reduction_neutrality(const SedanRuns& r) {
  if (!r.full) return {false, "skipped (--skip-full)"};
  const double gap = std::abs(r.full->cost - r.rd.cost) / std::abs(r.full->cost);
  const double ratio = r.full->median_solve_ms / r.rd.median_solve_ms;
  return {gap <= 0.01 && ratio >= 5.0 && r.full_wall_s <= 600.0,
          fmt::format("cost full {:.4g} vs reduced {:.4g}, gap {:.2f}% (<= 1%); median step {:.1f} ms vs {:.1f} ms, "
                      "ratio {:.1f} (>= 5); full run {:.0f} s (<= 600)",
                      r.full->cost, r.rd.cost, 100.0 * gap, r.full->median_solve_ms, r.rd.median_solve_ms, ratio,
                      r.full_wall_s)};
}

// 4
Outcome controller_ordering(const SedanRuns& r) {
  const double ratio = r.lmpc.cost / r.rd.cost;
  return {ratio >= 2.0, fmt::format("LMPC cost {:.4g} / RD-DeePC cost {:.4g} = {:.2f} (>= 2)", r.lmpc.cost,
                                    r.rd.cost, ratio)};
}

// 5
Outcome rollover_prevention(const SedanRuns& r) {
  const bool ok = r.driver.rolled_over && !r.rd.rolled_over && r.rd.max_abs_ltr <= 1.0 && r.rd.mean_speed_kmh >= 90.0;
  return {ok, fmt::format("driver: {}; RD-DeePC: {}", brief(r.driver), brief(r.rd))};
}

// 6
Outcome truck() {
  harness::PreparedScenario prep(scenario("truck"));
  const auto rd = harness::compute_metrics(prep.run(harness::ControllerKind::kRdDeepc), prep.config());
  const auto lm = harness::compute_metrics(prep.run(harness::ControllerKind::kLmpc), prep.config());
  const bool ok = rd.violations == 0 && !rd.rolled_over && rd.mean_speed_kmh > lm.mean_speed_kmh &&
                  lm.low_speed_dwell > rd.low_speed_dwell;
  return {ok, fmt::format("RD-DeePC: {}, {} violations, dwell {:.3f}; LMPC: {}, dwell {:.3f}", brief(rd),
                          rd.violations, rd.low_speed_dwell, brief(lm), lm.low_speed_dwell)};
}

// 7
Outcome riverbed() {
  harness::PreparedScenario prep(scenario("sedan-riverbed"));
  const auto rd = harness::compute_metrics(prep.run(harness::ControllerKind::kRdDeepc), prep.config());
  const auto lm = harness::compute_metrics(prep.run(harness::ControllerKind::kLmpc), prep.config());
  return {!rd.rolled_over && lm.rolled_over, fmt::format("RD-DeePC: {}; LMPC: {}", brief(rd), brief(lm))};
}

// 8
struct Cornering {
  double vx = 0.0, radius = 0.0, ltr = 0.0;
};

// Fixed steering wheel angle, speed held by the governor, 30 s to settle.
Cornering corner(const harness::VehicleSetup& vs, double v_kmh, double steer_deg) {
  plant::Vehicle veh(vs.params, vs.tires, plant::TerrainProfile(vs.tires.mu_nominal));
  veh.reset(plant::VehicleState::cruising(v_kmh / 3.6, vs.params.r_w));
  plant::SpeedGovernor gov(vs.governor, vs.params);
  gov.preset_for_cruise(v_kmh / 3.6);
  for (int k = 0; k < 3000; ++k) {
    plant::PlantInput in;
    in.steering_wheel_deg = steer_deg * std::min(1.0, k / 100.0);
    in.torque = gov.torques(veh.state(), v_kmh, 0.01);
    veh.advance(in, 0.01, 10);
  }
  if (veh.rolled_over()) throw std::runtime_error("steady cornering run rolled over");
  return {veh.state().vx, veh.state().vx / veh.state().r, veh.outputs().ltr};
}

Outcome plant_oracle() {
  const harness::VehicleSetup vs = scenario("sedan-1").vehicle();
  const plant::VehicleParams& vp = vs.params;
  const std::vector<std::pair<double, double>> cases = {{60, 120}, {70, 200}, {80, 150}, {90, 250}, {100, 300}};
  double worst = 0.0;
  std::string detail;
  for (const auto& [v_kmh, radius] : cases) {
    // kinematic first guess, then rescale until the realized radius matches
    double steer = vp.steering_ratio * (vp.l_f + vp.l_r) / radius * 180.0 / std::numbers::pi;
    Cornering c;
    for (int it = 0; it < 4; ++it) {
      c = corner(vs, v_kmh, steer);
      steer *= c.radius / radius;
    }
    const double ref = plant::steady_state_ltr(c.vx, c.radius, vp);
    const double err = std::abs(c.ltr / ref - 1.0);
    worst = std::max(worst, err);
    detail += fmt::format("{}{:.0f} km/h R{:.1f}: {:.4f} vs {:.4f}", detail.empty() ? "" : "; ", c.vx * 3.6, c.radius,
                          c.ltr, ref);
  }
  return {worst <= 0.02, fmt::format("worst relative error {:.3f}% (<= 2%): {}", 100.0 * worst, detail)};
}

// 9
Outcome qp_certification() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> width(0.2, 1.0);
  std::uniform_int_distribution<int> dim(2, 50);
  double worst_kkt = 0.0, worst_obj = 0.0;
  int unsolved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dim(rng);
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = normal(rng);
    qp::QpProblem p;
    p.P = M.transpose() * M / n + 0.1 * Eigen::MatrixXd::Identity(n, n);
    p.q.resize(n);
    p.l.resize(n);
    p.u.resize(n);
    for (int i = 0; i < n; ++i) {
      p.q[i] = 2.0 * normal(rng);
      p.l[i] = -width(rng);
      p.u[i] = width(rng);
    }
    p.A = Eigen::MatrixXd::Identity(n, n);
    qp::SolverSettings s;
    s.eps_abs = s.eps_rel = 1e-9;
    s.polish = true;
    const qp::QpSolution sol = qp::solve(p, s);
    if (!sol.solved()) ++unsolved;
    const qp::KktResiduals r = qp::kkt_residuals(p, sol.x, sol.y);
    worst_kkt = std::max({worst_kkt, r.primal, r.dual});
    const auto ref = testing::box_qp_oracle(p.P, p.q, p.l, p.u);
    worst_obj = std::max(worst_obj, std::abs(sol.objective - ref.objective));
  }
  const double secs = seconds_since(t0);
  return {unsolved == 0 && worst_kkt <= 1e-6 && worst_obj <= 1e-5 && secs < 30.0,
          fmt::format("{} unsolved; max KKT residual {:.2e} (<= 1e-6); max objective gap {:.2e} (<= 1e-5); {:.1f} s "
                      "(< 30)",
                      unsolved, worst_kkt, worst_obj, secs)};
}

}  // namespace

int main(int argc, char** argv) {
  bool skip_full = false;
  for (int i = 1; i < argc; ++i) skip_full |= std::strcmp(argv[i], "--skip-full") == 0;

  int failed = 0;
  auto report = [&](int id, const char* title, const Outcome& o) {
    fmt::print("[{}] {} {}: {}\n", o.pass ? "PASS" : "FAIL", id, title, o.detail);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("error: ") + e.what()};
    }
  };

  report(1, "fundamental lemma", guarded(fundamental_lemma));
  report(2, "DeePC equals exact-model MPC", guarded(deepc_equals_mpc));
  std::optional<SedanRuns> sedan;
  std::string sedan_error;
  try {
    sedan = sedan_runs(!skip_full);
  } catch (const std::exception& e) {
    sedan_error = std::string("error: ") + e.what();
  }
  auto with_sedan = [&](const std::function<Outcome(const SedanRuns&)>& f) {
    return sedan ? f(*sedan) : Outcome{false, sedan_error};
  };
  report(3, "dimension-reduction neutrality", with_sedan(reduction_neutrality));
  report(4, "controller ordering", with_sedan(controller_ordering));
  report(5, "rollover prevention", with_sedan(rollover_prevention));
  report(6, "truck scenario", guarded(truck));
  report(7, "riverbed robustness", guarded(riverbed));
  report(8, "plant steady-state oracle", guarded(plant_oracle));
  report(9, "QP certification", guarded(qp_certification));
  fmt::print("{} of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
