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

#ifndef RDEEPC_DATA_TRAJECTORY_LOG_HPP_
#define RDEEPC_DATA_TRAJECTORY_LOG_HPP_

#include <Eigen/Dense>

#include <stdexcept>

namespace rdeepc::data {

/// Recorded input/output data: u is (m x T), y is (p x T).
struct TrajectoryLog {
  Eigen::MatrixXd u;
  Eigen::MatrixXd y;
  double sample_time = 0.01;

  int input_dim() const { return static_cast<int>(u.rows()); }
  int output_dim() const { return static_cast<int>(y.rows()); }
  int length() const { return static_cast<int>(u.cols()); }

  void validate() const {
    if (u.cols() != y.cols()) {
      throw std::invalid_argument("TrajectoryLog: input and output lengths differ");
    }
    if (!u.allFinite() || !y.allFinite()) {
      throw std::invalid_argument("TrajectoryLog: non-finite samples");
    }
    if (!(sample_time > 0.0)) throw std::invalid_argument("TrajectoryLog: sample_time <= 0");
  }

  /// Samples [begin, begin + count).
  TrajectoryLog slice(int begin, int count) const {
    if (begin < 0 || count < 0 || begin + count > length()) {
      throw std::out_of_range("TrajectoryLog::slice out of range");
    }
    return {u.middleCols(begin, count), y.middleCols(begin, count), sample_time};
  }
};

}  // namespace rdeepc::data

#endif  // RDEEPC_DATA_TRAJECTORY_LOG_HPP_
