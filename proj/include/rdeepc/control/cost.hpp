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

#ifndef RDEEPC_CONTROL_COST_HPP_
#define RDEEPC_CONTROL_COST_HPP_

#include <Eigen/Dense>

#include <stdexcept>

namespace rdeepc::control {

/// Sum over the run of |u - u_r|_R^2 + |y - y_r|_Q^2 with diagonal weights.
/// Signals are (channels x T) and must be aligned sample for sample.
inline double closed_loop_cost(const Eigen::MatrixXd& u, const Eigen::MatrixXd& y, const Eigen::MatrixXd& u_ref,
                               const Eigen::MatrixXd& y_ref, const Eigen::VectorXd& q_weights,
                               const Eigen::VectorXd& r_weights) {
  if (u.rows() != u_ref.rows() || u.cols() != u_ref.cols() || y.rows() != y_ref.rows() ||
      y.cols() != y_ref.cols() || u.cols() != y.cols()) {
    throw std::invalid_argument("closed_loop_cost: logs are not aligned");
  }
  if (r_weights.size() != u.rows() || q_weights.size() != y.rows()) {
    throw std::invalid_argument("closed_loop_cost: weight dimensions do not match the signals");
  }
  const double input_part = (r_weights.asDiagonal() * (u - u_ref).cwiseAbs2()).sum();
  const double output_part = (q_weights.asDiagonal() * (y - y_ref).cwiseAbs2()).sum();
  return input_part + output_part;
}

}  // namespace rdeepc::control

#endif  // RDEEPC_CONTROL_COST_HPP_
