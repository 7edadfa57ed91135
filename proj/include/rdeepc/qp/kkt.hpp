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

#ifndef RDEEPC_QP_KKT_HPP_
#define RDEEPC_QP_KKT_HPP_

#include <algorithm>
#include <cmath>

#include "rdeepc/qp/qp_problem.hpp"

namespace rdeepc::qp {

struct KktResiduals {
  double primal = 0.0;           // max violation of l <= Ax <= u
  double dual = 0.0;             // ||Px + q + A'y||_inf
  double complementarity = 0.0;  // max_i |y_i| * (distance of Ax_i to the bound y_i pushes on)
};

/// Recomputes optimality residuals from scratch for a candidate (x, y).
/// Sign convention: y_i > 0 pushes against u_i, y_i < 0 against l_i.
inline KktResiduals kkt_residuals(const QpProblem& p, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y) {
  KktResiduals r;
  const Eigen::VectorXd ax = p.A * x;
  for (Eigen::Index i = 0; i < ax.size(); ++i) {
    const double v = std::max({p.l[i] - ax[i], ax[i] - p.u[i], 0.0});
    r.primal = std::max(r.primal, v);
    double c = 0.0;
    if (y[i] > 0.0) {
      c = std::isfinite(p.u[i]) ? y[i] * std::abs(p.u[i] - ax[i]) : y[i];
    } else if (y[i] < 0.0) {
      c = std::isfinite(p.l[i]) ? -y[i] * std::abs(ax[i] - p.l[i]) : -y[i];
    }
    r.complementarity = std::max(r.complementarity, c);
  }
  Eigen::VectorXd g = p.P * x + p.q;
  if (p.A.rows() > 0) g.noalias() += p.A.transpose() * y;
  r.dual = g.size() > 0 ? g.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

inline KktResiduals kkt_residuals(const QpProblem& p, const QpSolution& s) {
  return kkt_residuals(p, s.x, s.y);
}

}  // namespace rdeepc::qp

#endif  // RDEEPC_QP_KKT_HPP_
