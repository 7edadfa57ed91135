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

#ifndef RDEEPC_CONTROL_BUFFERS_HPP_
#define RDEEPC_CONTROL_BUFFERS_HPP_

#include <Eigen/Dense>

#include <stdexcept>

namespace rdeepc::control {

/// The most recent T_ini inputs and outputs, oldest first.
class IniBuffers {
 public:
  IniBuffers(int m, int p, int t_ini) : u_(m, t_ini), y_(p, t_ini), t_ini_(t_ini) {
    if (m <= 0 || p <= 0 || t_ini <= 0) throw std::invalid_argument("IniBuffers: dimensions must be positive");
    u_.setZero();
    y_.setZero();
  }

  void push(const Eigen::VectorXd& u, const Eigen::VectorXd& y) {
    if (u.size() != u_.rows() || y.size() != y_.rows()) {
      throw std::invalid_argument("IniBuffers::push: sample dimension mismatch");
    }
    // Columns shift left by one; the newest sample goes last.
    for (int k = 0; k + 1 < t_ini_; ++k) {
      u_.col(k) = u_.col(k + 1);
      y_.col(k) = y_.col(k + 1);
    }
    u_.col(t_ini_ - 1) = u;
    y_.col(t_ini_ - 1) = y;
    if (count_ < t_ini_) ++count_;
  }

  bool full() const { return count_ == t_ini_; }
  int count() const { return count_; }
  int t_ini() const { return t_ini_; }

  /// Sample-major stacking matching the library rows.
  Eigen::VectorXd u_ini() const { return Eigen::Map<const Eigen::VectorXd>(u_.data(), u_.size()); }
  Eigen::VectorXd y_ini() const { return Eigen::Map<const Eigen::VectorXd>(y_.data(), y_.size()); }
  const Eigen::MatrixXd& u_window() const { return u_; }
  const Eigen::MatrixXd& y_window() const { return y_; }

 private:
  Eigen::MatrixXd u_, y_;
  int t_ini_;
  int count_ = 0;
};

/// Functional form of a single FIFO update.
inline IniBuffers update_ini_buffers(IniBuffers state, const Eigen::VectorXd& u, const Eigen::VectorXd& y) {
  state.push(u, y);
  return state;
}

}  // namespace rdeepc::control

#endif  // RDEEPC_CONTROL_BUFFERS_HPP_
