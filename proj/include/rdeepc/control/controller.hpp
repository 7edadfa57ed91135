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

#ifndef RDEEPC_CONTROL_CONTROLLER_HPP_
#define RDEEPC_CONTROL_CONTROLLER_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdeepc/qp/admm_solver.hpp"
#include "rdeepc/util/config.hpp"

namespace rdeepc::control {

/// Elementwise box on one sample of a signal.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int size() const { return static_cast<int>(lower.size()); }

  void validate(const char* what) const {
    if (lower.size() != upper.size()) throw std::invalid_argument(std::string(what) + ": bound sizes differ");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
      if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i]) {
        throw std::invalid_argument(std::string(what) + ": empty or invalid box");
      }
    }
  }

  Eigen::VectorXd clip(const Eigen::VectorXd& v) const { return v.cwiseMax(lower).cwiseMin(upper); }
  bool contains(const Eigen::VectorXd& v, double tol = 0.0) const {
    return ((v - lower).array() >= -tol).all() && ((upper - v).array() >= -tol).all();
  }
  /// Repeats the box over a horizon of n samples.
  Eigen::VectorXd lower_stacked(int n) const { return lower.replicate(n, 1); }
  Eigen::VectorXd upper_stacked(int n) const { return upper.replicate(n, 1); }

  static Box unbounded(int n) {
    return {Eigen::VectorXd::Constant(n, -qp::kInf), Eigen::VectorXd::Constant(n, qp::kInf)};
  }
};

/// Settings shared by the data-driven and the model-based controllers.
struct PredictiveConfig {
  int t_ini = 100;
  int horizon = 100;
  Eigen::VectorXd q_weights;  // per output channel, repeated over the horizon
  Eigen::VectorXd r_weights;  // per input channel
  double lambda_g = 100.0;
  double lambda_y = 1e8;
  double lambda_u = 0.0;
  bool slack_u = false;  // sigma_u fixed at zero unless enabled
  bool slack_y = true;
  Box input_box;
  Box output_box;
  int apply_horizon = 1;
  qp::SolverSettings solver;

  int m() const { return static_cast<int>(r_weights.size()); }
  int p() const { return static_cast<int>(q_weights.size()); }

  void validate() const {
    if (t_ini <= 0 || horizon <= 0) throw std::invalid_argument("controller: T_ini and N must be positive");
    if (apply_horizon < 1 || apply_horizon >= horizon) {
      throw std::invalid_argument("controller: apply horizon must satisfy 1 <= l < N");
    }
    if ((q_weights.array() < 0.0).any() || (r_weights.array() < 0.0).any()) {
      throw std::invalid_argument("controller: weights must be nonnegative");
    }
    if (lambda_g < 0.0 || lambda_y < 0.0 || lambda_u < 0.0) {
      throw std::invalid_argument("controller: regularizers must be nonnegative");
    }
    input_box.validate("input box");
    output_box.validate("output box");
    if (input_box.size() != m() || output_box.size() != p()) {
      throw std::invalid_argument("controller: box dimensions do not match the weights");
    }
    solver.validate();
  }
};

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Reads controller keys; the vehicle-level defaults are m = 2, p = 1.
inline PredictiveConfig predictive_config_from(const util::Config& c) {
  PredictiveConfig cfg;
  cfg.t_ini = c.get_int("t_ini", cfg.t_ini);
  cfg.horizon = c.get_int("horizon", cfg.horizon);
  cfg.r_weights = to_vector(c.has("r_weights") ? c.get_list("r_weights") : std::vector<double>{1.0, 5e-4});
  cfg.q_weights = to_vector(c.has("q_weights") ? c.get_list("q_weights") : std::vector<double>{0.0});
  cfg.lambda_g = c.get_double("lambda_g", cfg.lambda_g);
  cfg.lambda_y = c.get_double("lambda_y", cfg.lambda_y);
  cfg.lambda_u = c.get_double("lambda_u", cfg.lambda_u);
  cfg.slack_u = c.get_bool("slack_u", cfg.slack_u);
  cfg.slack_y = c.get_bool("slack_y", cfg.slack_y);
  cfg.input_box = {to_vector(c.has("input_lower") ? c.get_list("input_lower") : std::vector<double>{-200.0, 100.0}),
                   to_vector(c.has("input_upper") ? c.get_list("input_upper") : std::vector<double>{200.0, 120.0})};
  cfg.output_box = {to_vector(c.has("output_lower") ? c.get_list("output_lower") : std::vector<double>{-1.0}),
                    to_vector(c.has("output_upper") ? c.get_list("output_upper") : std::vector<double>{1.0})};
  cfg.apply_horizon = c.get_int("apply_horizon", cfg.apply_horizon);
  cfg.solver.eps_abs = c.get_double("solver_eps_abs", cfg.solver.eps_abs);
  cfg.solver.eps_rel = c.get_double("solver_eps_rel", cfg.solver.eps_rel);
  cfg.solver.max_iter = c.get_int("solver_max_iter", cfg.solver.max_iter);
  cfg.solver.rho = c.get_double("solver_rho", cfg.solver.rho);
  cfg.solver.polish = c.get_bool("solver_polish", cfg.solver.polish);
  cfg.validate();
  return cfg;
}

struct StepDiagnostics {
  double solve_ms = 0.0;     // QP solve plus linear-term assembly
  double assemble_ms = 0.0;  // included in solve_ms
  int iterations = 0;
  double objective = 0.0;
  double sigma_y_norm = 0.0;
  bool fallback = false;
  bool softened = false;  // output box relaxed after an infeasible solve
  bool bootstrap = false;
  qp::QpStatus status = qp::QpStatus::kSolved;
};

struct StepResult {
  Eigen::VectorXd input;          // first applied sample, clipped to the input box
  Eigen::MatrixXd input_plan;     // m x N
  Eigen::MatrixXd output_plan;    // p x N
  StepDiagnostics diagnostics;
};

/// Receding-horizon controller fed with one measured sample per tick.
class PredictiveController {
 public:
  virtual ~PredictiveController() = default;
  /// Plans with references held constant over the horizon.
  virtual StepResult step(const Eigen::VectorXd& u_ref, const Eigen::VectorXd& y_ref) = 0;
  /// Records the input applied and the output measured at this tick.
  virtual void observe(const Eigen::VectorXd& u_applied, const Eigen::VectorXd& y_measured) = 0;
  virtual std::string name() const = 0;
};

}  // namespace rdeepc::control

#endif  // RDEEPC_CONTROL_CONTROLLER_HPP_
