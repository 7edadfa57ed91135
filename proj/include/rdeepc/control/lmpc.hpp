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

#ifndef RDEEPC_CONTROL_LMPC_HPP_
#define RDEEPC_CONTROL_LMPC_HPP_

#include <Eigen/Dense>

#include <chrono>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdeepc/control/buffers.hpp"
#include "rdeepc/control/controller.hpp"
#include "rdeepc/control/identification.hpp"
#include "rdeepc/qp/admm_solver.hpp"

namespace rdeepc::control {

/// Batch prediction Y = free + Gamma U over N samples, sample-major.
struct Prediction {
  Eigen::MatrixXd Phi;    // pN x n
  Eigen::MatrixXd Gamma;  // pN x mN
};

inline Prediction prediction_matrices(const LinearModel& s, int N) {
  const int n = s.order(), m = s.m(), p = s.p();
  Prediction pr;
  pr.Phi.resize(p * N, n);
  pr.Gamma = Eigen::MatrixXd::Zero(p * N, m * N);
  // markov[k] = C A^(k-1) B for k >= 1, D for k = 0.
  std::vector<Eigen::MatrixXd> markov(N);
  markov[0] = s.D;
  Eigen::MatrixXd CA = s.C;
  for (int k = 0; k < N; ++k) {
    pr.Phi.middleRows(k * p, p) = CA;
    if (k + 1 < N) markov[k + 1] = CA * s.B;
    CA = CA * s.A;
  }
  for (int k = 0; k < N; ++k) {
    for (int j = 0; j <= k; ++j) pr.Gamma.block(k * p, j * m, p, m) = markov[k - j];
  }
  return pr;
}

/// Linear map from a (u, y) window of length T to the state at the sample
/// after it: x = Ey * (y - y0) + Eu * (u - u0), window stacked sample-major.
struct WindowObserver {
  Eigen::MatrixXd Ey;
  Eigen::MatrixXd Eu;
  Eigen::VectorXd u0_stacked, y0_stacked;

  Eigen::VectorXd estimate(const Eigen::VectorXd& u_win, const Eigen::VectorXd& y_win) const {
    return Ey * (y_win - y0_stacked) + Eu * (u_win - u0_stacked);
  }
};

inline WindowObserver window_observer(const LinearModel& s, int T) {
  const int n = s.order(), m = s.m();
  const Prediction pr = prediction_matrices(s, T);
  // Reachability part: x_T = A^T x_0 + sum_j A^(T-1-j) B u_j.
  Eigen::MatrixXd reach(n, m * T);
  Eigen::MatrixXd Ak = Eigen::MatrixXd::Identity(n, n);
  for (int j = T - 1; j >= 0; --j) {
    reach.middleCols(j * m, m) = Ak * s.B;
    Ak = s.A * Ak;
  }
  const Eigen::MatrixXd AT = Ak;
  const Eigen::MatrixXd Opinv = pr.Phi.completeOrthogonalDecomposition().pseudoInverse();
  WindowObserver ob;
  ob.Ey = AT * Opinv;
  ob.Eu = reach - AT * Opinv * pr.Gamma;
  ob.u0_stacked = s.u0.replicate(T, 1);
  ob.y0_stacked = s.y0.replicate(T, 1);
  return ob;
}

/// Condensed model-based MPC over the stacked input sequence.
struct LmpcTemplate {
  LinearModel model;
  PredictiveConfig config;
  Prediction prediction;
  WindowObserver observer;
  qp::QpProblem hard;  // rows: U box, Gamma U in shifted output box
  qp::QpProblem soft;  // variables [U; s], rows: U box, Gamma U - s in the box

  /// Predicted output with U = 0: y0 + Phi x - Gamma U0.
  Eigen::VectorXd free_response(const Eigen::VectorXd& x) const {
    const int N = config.horizon;
    return model.y0.replicate(N, 1) + prediction.Phi * x - prediction.Gamma * model.u0.replicate(N, 1);
  }
};

inline LmpcTemplate lmpc_condense(const LinearModel& model, const PredictiveConfig& cfg) {
  cfg.validate();
  model.validate();
  if (model.m() != cfg.m() || model.p() != cfg.p()) {
    throw std::invalid_argument("lmpc_condense: model dimensions do not match the weights");
  }
  const int N = cfg.horizon, m = cfg.m(), p = cfg.p();
  LmpcTemplate t;
  t.model = model;
  t.config = cfg;
  t.prediction = prediction_matrices(model, N);
  t.observer = window_observer(model, cfg.t_ini);

  const Eigen::VectorXd r_bar = cfg.r_weights.replicate(N, 1);
  const Eigen::VectorXd q_bar = cfg.q_weights.replicate(N, 1);
  const Eigen::MatrixXd& G = t.prediction.Gamma;
  Eigen::MatrixXd P = 2.0 * G.transpose() * q_bar.asDiagonal() * G;
  P.diagonal() += 2.0 * r_bar;

  const int nu = m * N, ny = p * N;
  t.hard.P = P;
  t.hard.q = Eigen::VectorXd::Zero(nu);
  t.hard.A.resize(nu + ny, nu);
  t.hard.A << Eigen::MatrixXd::Identity(nu, nu), G;
  t.hard.l.resize(nu + ny);
  t.hard.u.resize(nu + ny);
  t.hard.l << cfg.input_box.lower_stacked(N), cfg.output_box.lower_stacked(N);
  t.hard.u << cfg.input_box.upper_stacked(N), cfg.output_box.upper_stacked(N);
  t.hard.validate();

  t.soft.P = Eigen::MatrixXd::Zero(nu + ny, nu + ny);
  t.soft.P.topLeftCorner(nu, nu) = P;
  t.soft.P.bottomRightCorner(ny, ny).diagonal().setConstant(2.0 * cfg.lambda_y);
  t.soft.q = Eigen::VectorXd::Zero(nu + ny);
  t.soft.A = Eigen::MatrixXd::Zero(nu + ny, nu + ny);
  t.soft.A.topLeftCorner(nu, nu).setIdentity();
  t.soft.A.bottomLeftCorner(ny, nu) = G;
  t.soft.A.bottomRightCorner(ny, ny) = -Eigen::MatrixXd::Identity(ny, ny);
  t.soft.l = t.hard.l;
  t.soft.u = t.hard.u;
  t.soft.validate();
  return t;
}

/// Receding-horizon MPC with the window observer; falls back to a softened
/// output box when the hard problem is not solved.
class LmpcController final : public PredictiveController {
 public:
  explicit LmpcController(LmpcTemplate tmpl, std::string label = "lmpc")
      : tmpl_(std::move(tmpl)),
        hard_(tmpl_.hard, tmpl_.config.solver),
        soft_(tmpl_.soft, tmpl_.config.solver),
        buffers_(tmpl_.config.m(), tmpl_.config.p(), tmpl_.config.t_ini),
        label_(std::move(label)) {}

  LmpcController(const LinearModel& model, const PredictiveConfig& cfg, std::string label = "lmpc")
      : LmpcController(lmpc_condense(model, cfg), std::move(label)) {}

  /// Plans from an explicitly given state, bypassing the observer.
  StepResult plan_from_state(const Eigen::VectorXd& x, const Eigen::VectorXd& u_ref,
                             const Eigen::VectorXd& y_ref) {
    const auto& cfg = tmpl_.config;
    const int N = cfg.horizon, m = cfg.m(), p = cfg.p(), nu = m * N, ny = p * N;
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::VectorXd f = tmpl_.free_response(x);
    const Eigen::VectorXd r_bar = cfg.r_weights.replicate(N, 1);
    const Eigen::VectorXd q_bar = cfg.q_weights.replicate(N, 1);
    const Eigen::VectorXd U_r = u_ref.replicate(N, 1);
    const Eigen::VectorXd e = f - y_ref.replicate(N, 1);
    const Eigen::VectorXd q =
        -2.0 * r_bar.cwiseProduct(U_r) + 2.0 * tmpl_.prediction.Gamma.transpose() * q_bar.cwiseProduct(e);
    const double constant = U_r.dot(r_bar.cwiseProduct(U_r)) + e.dot(q_bar.cwiseProduct(e));
    Eigen::VectorXd l = tmpl_.hard.l, u = tmpl_.hard.u;
    l.tail(ny) -= f;
    u.tail(ny) -= f;
    hard_.update_linear_cost(q);
    hard_.update_bounds(l, u);
    const auto t1 = std::chrono::steady_clock::now();

    StepResult res;
    auto& d = res.diagnostics;
    d.assemble_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (hard_warm_) hard_.warm_start(hard_last_.x, hard_last_.y); else hard_.cold_start();
    qp::QpSolution sol = hard_.solve();
    d.iterations = sol.iterations;
    d.status = sol.status;
    Eigen::VectorXd U;
    if (sol.solved()) {
      hard_last_ = sol;
      hard_warm_ = true;
      U = sol.x;
      d.objective = sol.objective + constant;
    } else {
      hard_warm_ = false;
      Eigen::VectorXd qs = Eigen::VectorXd::Zero(nu + ny);
      qs.head(nu) = q;
      soft_.update_linear_cost(qs);
      soft_.update_bounds(l, u);
      if (soft_warm_) soft_.warm_start(soft_last_.x, soft_last_.y); else soft_.cold_start();
      qp::QpSolution ss = soft_.solve();
      d.iterations += ss.iterations;
      d.status = ss.status;
      d.softened = true;
      ++softened_;
      if (ss.solved()) {
        soft_last_ = ss;
        soft_warm_ = true;
        U = ss.x.head(nu);
        d.objective = ss.objective + constant;
        d.sigma_y_norm = ss.x.tail(ny).norm();
      } else {
        soft_warm_ = false;
      }
    }
    d.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (U.size() == 0) {
      ++fallbacks_;
      d.fallback = true;
      d.objective = std::numeric_limits<double>::quiet_NaN();
      res.input = cfg.input_box.clip(last_applied_ ? *last_applied_ : u_ref);
      res.input_plan = res.input.replicate(1, N);
      res.output_plan = y_ref.replicate(1, N);
      return res;
    }
    const Eigen::VectorXd Y = f + tmpl_.prediction.Gamma * U;
    res.input_plan = Eigen::Map<const Eigen::MatrixXd>(U.data(), m, N);
    res.output_plan = Eigen::Map<const Eigen::MatrixXd>(Y.data(), p, N);
    res.input = cfg.input_box.clip(res.input_plan.col(0));
    return res;
  }

  StepResult step(const Eigen::VectorXd& u_ref, const Eigen::VectorXd& y_ref) override {
    const auto& cfg = tmpl_.config;
    if (u_ref.size() != cfg.m() || y_ref.size() != cfg.p()) {
      throw std::invalid_argument("LmpcController::step: reference dimension mismatch");
    }
    if (!buffers_.full()) {
      StepResult res;
      res.input = cfg.input_box.clip(u_ref);
      res.input_plan = res.input.replicate(1, cfg.horizon);
      res.output_plan = y_ref.replicate(1, cfg.horizon);
      res.diagnostics.bootstrap = true;
      return res;
    }
    if (plan_ && plan_index_ < cfg.apply_horizon) return next_from_plan();
    const Eigen::VectorXd x = tmpl_.observer.estimate(buffers_.u_ini(), buffers_.y_ini());
    StepResult res = plan_from_state(x, u_ref, y_ref);
    if (res.diagnostics.fallback) {
      plan_ = false;
      return res;
    }
    plan_u_ = res.input_plan;
    plan_y_ = res.output_plan;
    plan_ = true;
    plan_index_ = 0;
    StepResult out = next_from_plan();
    out.diagnostics = res.diagnostics;
    return out;
  }

  void observe(const Eigen::VectorXd& u_applied, const Eigen::VectorXd& y_measured) override {
    buffers_.push(u_applied, y_measured);
    last_applied_ = u_applied;
  }

  std::string name() const override { return label_; }
  const LmpcTemplate& lmpc_template() const { return tmpl_; }
  const IniBuffers& buffers() const { return buffers_; }
  int softened_steps() const { return softened_; }
  int fallbacks() const { return fallbacks_; }

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

  LmpcTemplate tmpl_;
  qp::AdmmSolver hard_, soft_;
  IniBuffers buffers_;
  std::string label_;
  qp::QpSolution hard_last_, soft_last_;
  bool hard_warm_ = false, soft_warm_ = false;
  std::optional<Eigen::VectorXd> last_applied_;
  Eigen::MatrixXd plan_u_, plan_y_;
  bool plan_ = false;
  int plan_index_ = 0;
  int softened_ = 0;
  int fallbacks_ = 0;
};

}  // namespace rdeepc::control

#endif  // RDEEPC_CONTROL_LMPC_HPP_
