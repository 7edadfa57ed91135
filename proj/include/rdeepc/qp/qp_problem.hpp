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

#ifndef RDEEPC_QP_QP_PROBLEM_HPP_
#define RDEEPC_QP_QP_PROBLEM_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rdeepc::qp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// minimize 0.5 x'Px + q'x  subject to  l <= Ax <= u.
/// Bounds may be +-infinity; equality rows use l == u.
struct QpProblem {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd A;
  Eigen::VectorXd l;
  Eigen::VectorXd u;

  int num_variables() const { return static_cast<int>(q.size()); }
  int num_constraints() const { return static_cast<int>(A.rows()); }

  double objective(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(P * x) + q.dot(x);
  }

  // Throws std::invalid_argument on inconsistent shapes or crossed bounds.
  void validate() const {
    const auto n = q.size();
    if (P.rows() != n || P.cols() != n) {
      throw std::invalid_argument("QpProblem: P must be " + std::to_string(n) +
                                  "x" + std::to_string(n));
    }
    if (A.cols() != n && A.rows() != 0) {
      throw std::invalid_argument("QpProblem: A column count must equal n");
    }
    if (l.size() != A.rows() || u.size() != A.rows()) {
      throw std::invalid_argument("QpProblem: bound sizes must equal rows of A");
    }
    for (Eigen::Index i = 0; i < l.size(); ++i) {
      if (std::isnan(l[i]) || std::isnan(u[i]) || l[i] > u[i]) {
        throw std::invalid_argument("QpProblem: requires l <= u (row " +
                                    std::to_string(i) + ")");
      }
    }
    if (!P.allFinite() || !q.allFinite() || !A.allFinite()) {
      throw std::invalid_argument("QpProblem: non-finite problem data");
    }
  }
};

enum class QpStatus {
  kSolved,
  kMaxIterations,
  kPrimalInfeasible,
  kDualInfeasible,
};

inline const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::kSolved: return "solved";
    case QpStatus::kMaxIterations: return "max_iter";
    case QpStatus::kPrimalInfeasible: return "primal_infeasible";
    case QpStatus::kDualInfeasible: return "dual_infeasible";
  }
  return "unknown";
}

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  QpStatus status = QpStatus::kMaxIterations;
  int iterations = 0;
  double primal_residual = kInf;
  double dual_residual = kInf;
  double objective = kInf;
  double solve_time_s = 0.0;
  bool polished = false;

  bool solved() const { return status == QpStatus::kSolved; }
};

}  // namespace rdeepc::qp

#endif  // RDEEPC_QP_QP_PROBLEM_HPP_
