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

#ifndef RDEEPC_CONTROL_DEEPC_HPP_
#define RDEEPC_CONTROL_DEEPC_HPP_

#include <Eigen/Dense>

#include <chrono>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "rdeepc/control/buffers.hpp"
#include "rdeepc/control/controller.hpp"
#include "rdeepc/data/library.hpp"
#include "rdeepc/qp/admm_solver.hpp"

namespace rdeepc::control {

/// Condensed DeePC problem in the library weights g alone.
///
/// Constraint rows, top to bottom: U_p g = u_ini (absent with an input
/// slack), Y_p g = y_ini (absent with an output slack), U_f g in the input
/// box, Y_f g in the output box.
struct QpTemplate {
  qp::QpProblem problem;  // q, l, u hold placeholders until assembled
  data::DataLibrary library;
  PredictiveConfig config;
  Eigen::MatrixXd ref_u_gain;  // K x m, maps a held input reference to q
  Eigen::MatrixXd ref_y_gain;  // K x p
  int rows_u_ini = 0;
  int rows_y_ini = 0;

  int variables() const { return library.columns(); }

  /// Linear cost for the current window and references.
  Eigen::VectorXd linear_term(const Eigen::VectorXd& u_ini, const Eigen::VectorXd& y_ini,
                              const Eigen::VectorXd& u_ref, const Eigen::VectorXd& y_ref) const {
    Eigen::VectorXd q = ref_u_gain * u_ref;
    if (config.q_weights.any()) q.noalias() += ref_y_gain * y_ref;
    if (config.slack_y && config.lambda_y > 0.0) {
      q.noalias() -= (2.0 * config.lambda_y) * (library.Yp.transpose() * y_ini);
    }
    if (config.slack_u && config.lambda_u > 0.0) {
      q.noalias() -= (2.0 * config.lambda_u) * (library.Up.transpose() * u_ini);
    }
    return q;
  }

  /// Objective terms that do not depend on g.
  double constant_term(const Eigen::VectorXd& u_ini, const Eigen::VectorXd& y_ini,
                       const Eigen::VectorXd& u_ref, const Eigen::VectorXd& y_ref) const {
    const int n = config.horizon;
    double c = n * (config.r_weights.array() * u_ref.array().square()).sum() +
               n * (config.q_weights.array() * y_ref.array().square()).sum();
    if (config.slack_y) c += config.lambda_y * y_ini.squaredNorm();
    if (config.slack_u) c += config.lambda_u * u_ini.squaredNorm();
    return c;
  }

  void bounds(const Eigen::VectorXd& u_ini, const Eigen::VectorXd& y_ini, Eigen::VectorXd& l,
              Eigen::VectorXd& u) const {
    l = problem.l;
    u = problem.u;
    if (rows_u_ini > 0) {
      l.head(rows_u_ini) = u_ini;
      u.head(rows_u_ini) = u_ini;
    }
    if (rows_y_ini > 0) {
      l.segment(rows_u_ini, rows_y_ini) = y_ini;
      u.segment(rows_u_ini, rows_y_ini) = y_ini;
    }
  }
};

inline void check_library_against(const data::DataLibrary& lib, const PredictiveConfig& cfg) {
  lib.validate();
  if (lib.m != cfg.m() || lib.p != cfg.p()) {
    throw std::invalid_argument("condense_deepc: library has m=" + std::to_string(lib.m) +
                                ", p=" + std::to_string(lib.p) + " but weights imply m=" +
                                std::to_string(cfg.m()) + ", p=" + std::to_string(cfg.p()));
  }
  if (lib.t_ini != cfg.t_ini || lib.horizon != cfg.horizon) {
    throw std::invalid_argument("condense_deepc: library depth (" + std::to_string(lib.t_ini) + "+" +
                                std::to_string(lib.horizon) + ") does not match T_ini+N (" +
                                std::to_string(cfg.t_ini) + "+" + std::to_string(cfg.horizon) + ")");
  }
}

inline QpTemplate condense_deepc(const data::DataLibrary& lib, const PredictiveConfig& cfg) {
  cfg.validate();
  check_library_against(lib, cfg);
  const int K = lib.columns();
  const int m = lib.m, p = lib.p, N = cfg.horizon, Ti = cfg.t_ini;

  QpTemplate t;
  t.library = lib;
  t.config = cfg;

  const Eigen::VectorXd r_bar = cfg.r_weights.replicate(N, 1);
  const Eigen::VectorXd q_bar = cfg.q_weights.replicate(N, 1);

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(K, K);
  P.selfadjointView<Eigen::Lower>().rankUpdate(lib.Uf.transpose() * r_bar.cwiseSqrt().asDiagonal());
  if (q_bar.any()) {
    P.selfadjointView<Eigen::Lower>().rankUpdate(lib.Yf.transpose() * q_bar.cwiseSqrt().asDiagonal());
  }
  if (cfg.slack_y && cfg.lambda_y > 0.0) {
    P.selfadjointView<Eigen::Lower>().rankUpdate(lib.Yp.transpose(), cfg.lambda_y);
  }
  if (cfg.slack_u && cfg.lambda_u > 0.0) {
    P.selfadjointView<Eigen::Lower>().rankUpdate(lib.Up.transpose(), cfg.lambda_u);
  }
  P.diagonal().array() += cfg.lambda_g;
  P = P.selfadjointView<Eigen::Lower>();
  P *= 2.0;

  // A constant reference over the horizon sums the block columns.
  t.ref_u_gain = Eigen::MatrixXd::Zero(K, m);
  t.ref_y_gain = Eigen::MatrixXd::Zero(K, p);
  for (int k = 0; k < N; ++k) {
    t.ref_u_gain.noalias() -= 2.0 * lib.Uf.middleRows(k * m, m).transpose() * cfg.r_weights.asDiagonal();
    t.ref_y_gain.noalias() -= 2.0 * lib.Yf.middleRows(k * p, p).transpose() * cfg.q_weights.asDiagonal();
  }

  t.rows_u_ini = cfg.slack_u ? 0 : m * Ti;
  t.rows_y_ini = cfg.slack_y ? 0 : p * Ti;
  const int rows = t.rows_u_ini + t.rows_y_ini + m * N + p * N;
  Eigen::MatrixXd A(rows, K);
  Eigen::VectorXd l(rows), u(rows);
  int r = 0;
  if (t.rows_u_ini > 0) {
    A.middleRows(r, t.rows_u_ini) = lib.Up;
    l.segment(r, t.rows_u_ini).setZero();
    u.segment(r, t.rows_u_ini).setZero();
    r += t.rows_u_ini;
  }
  if (t.rows_y_ini > 0) {
    A.middleRows(r, t.rows_y_ini) = lib.Yp;
    l.segment(r, t.rows_y_ini).setZero();
    u.segment(r, t.rows_y_ini).setZero();
    r += t.rows_y_ini;
  }
  A.middleRows(r, m * N) = lib.Uf;
  l.segment(r, m * N) = cfg.input_box.lower_stacked(N);
  u.segment(r, m * N) = cfg.input_box.upper_stacked(N);
  r += m * N;
  A.middleRows(r, p * N) = lib.Yf;
  l.segment(r, p * N) = cfg.output_box.lower_stacked(N);
  u.segment(r, p * N) = cfg.output_box.upper_stacked(N);

  t.problem.P = std::move(P);
  t.problem.q = Eigen::VectorXd::Zero(K);
  t.problem.A = std::move(A);
  t.problem.l = std::move(l);
  t.problem.u = std::move(u);
  t.problem.validate();
  return t;
}

inline QpTemplate condense_deepc(const data::ReducedLibrary& lib, const PredictiveConfig& cfg) {
  return condense_deepc(lib.blocks, cfg);
}

/// Receding-horizon DeePC over a fixed (full or reduced) library.
class DeepcController final : public PredictiveController {
 public:
  DeepcController(QpTemplate tmpl, std::string label = "deepc")
      : tmpl_(std::move(tmpl)),
        solver_(tmpl_.problem, tmpl_.config.solver),
        buffers_(tmpl_.config.m(), tmpl_.config.p(), tmpl_.config.t_ini),
        label_(std::move(label)) {}

  DeepcController(const data::DataLibrary& lib, const PredictiveConfig& cfg, std::string label = "deepc")
      : DeepcController(condense_deepc(lib, cfg), std::move(label)) {}

  StepResult step(const Eigen::VectorXd& u_ref, const Eigen::VectorXd& y_ref) override {
    const auto& cfg = tmpl_.config;
    if (u_ref.size() != cfg.m() || y_ref.size() != cfg.p()) {
      throw std::invalid_argument("DeepcController::step: reference dimension mismatch");
    }
    StepResult res;
    if (!buffers_.full()) {
      res.input = cfg.input_box.clip(u_ref);
      res.input_plan = res.input.replicate(1, cfg.horizon);
      res.output_plan = y_ref.replicate(1, cfg.horizon);
      res.diagnostics.bootstrap = true;
      return res;
    }
    if (plan_ && plan_index_ < cfg.apply_horizon) return next_from_plan();

    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::VectorXd u_ini = buffers_.u_ini();
    const Eigen::VectorXd y_ini = buffers_.y_ini();
    Eigen::VectorXd l, u;
    tmpl_.bounds(u_ini, y_ini, l, u);
    solver_.update_linear_cost(tmpl_.linear_term(u_ini, y_ini, u_ref, y_ref));
    solver_.update_bounds(l, u);
    const auto t1 = std::chrono::steady_clock::now();
    if (have_warm_) {
      solver_.warm_start(last_.x, last_.y);
    } else {
      solver_.cold_start();
    }
    qp::QpSolution sol = solver_.solve();
    const auto t2 = std::chrono::steady_clock::now();

    auto& d = res.diagnostics;
    d.assemble_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    d.solve_ms = std::chrono::duration<double, std::milli>(t2 - t0).count();
    d.iterations = sol.iterations;
    d.status = sol.status;
    ++solves_;

    if (sol.solved()) {
      d.objective = sol.objective + tmpl_.constant_term(u_ini, y_ini, u_ref, y_ref);
      d.sigma_y_norm = (tmpl_.library.Yp * sol.x - y_ini).norm();
      last_ = sol;
      have_warm_ = true;
      const Eigen::VectorXd uf = tmpl_.library.Uf * sol.x;
      const Eigen::VectorXd yf = tmpl_.library.Yf * sol.x;
      plan_u_ = Eigen::Map<const Eigen::MatrixXd>(uf.data(), cfg.m(), cfg.horizon);
      plan_y_ = Eigen::Map<const Eigen::MatrixXd>(yf.data(), cfg.p(), cfg.horizon);
      plan_ = true;
      plan_index_ = 0;
      StepResult out = next_from_plan();
      out.diagnostics = d;
      return out;
    }

    // Non-convergence: hold the previous input and say so.
    ++fallbacks_;
    d.fallback = true;
    d.objective = std::numeric_limits<double>::quiet_NaN();
    plan_ = false;
    have_warm_ = false;
    res.input = cfg.input_box.clip(last_applied_ ? *last_applied_ : u_ref);
    res.input_plan = res.input.replicate(1, cfg.horizon);
    res.output_plan = y_ref.replicate(1, cfg.horizon);
    return res;
  }

  void observe(const Eigen::VectorXd& u_applied, const Eigen::VectorXd& y_measured) override {
    buffers_.push(u_applied, y_measured);
    last_applied_ = u_applied;
  }

  std::string name() const override { return label_; }

  const QpTemplate& qp_template() const { return tmpl_; }
  const IniBuffers& buffers() const { return buffers_; }
  const qp::AdmmSolver& solver() const { return solver_; }
  const qp::QpSolution& last_solution() const { return last_; }
  int solves() const { return solves_; }
  int fallbacks() const { return fallbacks_; }
  /// Forces the next solve to start from zero.
  void drop_warm_start() { have_warm_ = false; }

 private:
  StepResult next_from_plan() {
    StepResult res;
    const int N = tmpl_.config.horizon;
    res.input = tmpl_.config.input_box.clip(plan_u_.col(plan_index_));
    res.input_plan = plan_u_.rightCols(N - plan_index_);
    res.output_plan = plan_y_.rightCols(N - plan_index_);
    ++plan_index_;
    return res;
  }

  QpTemplate tmpl_;
  qp::AdmmSolver solver_;
  IniBuffers buffers_;
  std::string label_;
  qp::QpSolution last_;
  bool have_warm_ = false;
  std::optional<Eigen::VectorXd> last_applied_;
  Eigen::MatrixXd plan_u_, plan_y_;
  bool plan_ = false;
  int plan_index_ = 0;
  int solves_ = 0;
  int fallbacks_ = 0;
};

}  // namespace rdeepc::control

#endif  // RDEEPC_CONTROL_DEEPC_HPP_
