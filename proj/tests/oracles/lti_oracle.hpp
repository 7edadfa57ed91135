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

// Random discrete-time LTI systems and their exact simulation, for
// fundamental-lemma and controller-equivalence checks.

#ifndef RDEEPC_TESTS_ORACLES_LTI_ORACLE_HPP_
#define RDEEPC_TESTS_ORACLES_LTI_ORACLE_HPP_

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cstdint>
#include <random>

namespace rdeepc::testing {

struct LtiSystem {
  Eigen::MatrixXd A, B, C, D;
  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }
};

inline Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = nd(rng);
  return M;
}

inline int controllability_rank(const LtiSystem& s) {
  const int n = s.n();
  Eigen::MatrixXd ctrb(n, n * s.m());
  Eigen::MatrixXd AkB = s.B;
  for (int k = 0; k < n; ++k) {
    ctrb.middleCols(k * s.m(), s.m()) = AkB;
    AkB = s.A * AkB;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ctrb);
  lu.setThreshold(1e-8);
  return static_cast<int>(lu.rank());
}

inline int observability_rank(const LtiSystem& s) {
  const int n = s.n();
  Eigen::MatrixXd obsv(n * s.p(), n);
  Eigen::MatrixXd CAk = s.C;
  for (int k = 0; k < n; ++k) {
    obsv.middleRows(k * s.p(), s.p()) = CAk;
    CAk = CAk * s.A;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(obsv);
  lu.setThreshold(1e-8);
  return static_cast<int>(lu.rank());
}

/// Stable (spectral radius `radius`), controllable and observable.
inline LtiSystem random_lti(std::uint64_t seed, int n, int m, int p, double radius = 0.9,
                            bool with_feedthrough = false) {
  std::mt19937_64 rng(seed);
  for (;;) {
    LtiSystem s;
    s.A = gaussian_matrix(rng, n, n);
    const double rho = s.A.eigenvalues().cwiseAbs().maxCoeff();
    s.A *= radius / rho;
    s.B = gaussian_matrix(rng, n, m);
    s.C = gaussian_matrix(rng, p, n);
    s.D = with_feedthrough ? gaussian_matrix(rng, p, m) : Eigen::MatrixXd::Zero(p, m);
    if (controllability_rank(s) == n && observability_rank(s) == n) return s;
  }
}

/// u is (m x T); returns y (p x T) starting from x0.
inline Eigen::MatrixXd simulate(const LtiSystem& s, const Eigen::MatrixXd& u,
                                const Eigen::VectorXd& x0) {
  Eigen::MatrixXd y(s.p(), u.cols());
  Eigen::VectorXd x = x0;
  for (Eigen::Index t = 0; t < u.cols(); ++t) {
    y.col(t) = s.C * x + s.D * u.col(t);
    x = s.A * x + s.B * u.col(t);
  }
  return y;
}

/// State after applying u from x0.
inline Eigen::VectorXd final_state(const LtiSystem& s, const Eigen::MatrixXd& u,
                                   const Eigen::VectorXd& x0) {
  Eigen::VectorXd x = x0;
  for (Eigen::Index t = 0; t < u.cols(); ++t) x = s.A * x + s.B * u.col(t);
  return x;
}

/// Least-squares initial state explaining (u, y): y = O x0 + T u.
inline Eigen::VectorXd recover_initial_state(const LtiSystem& s, const Eigen::MatrixXd& u,
                                             const Eigen::MatrixXd& y) {
  const int L = static_cast<int>(u.cols());
  const Eigen::MatrixXd y_forced = simulate(s, u, Eigen::VectorXd::Zero(s.n()));
  Eigen::MatrixXd O(s.p() * L, s.n());
  Eigen::MatrixXd CAk = s.C;
  for (int k = 0; k < L; ++k) {
    O.middleRows(k * s.p(), s.p()) = CAk;
    CAk = CAk * s.A;
  }
  const Eigen::MatrixXd diff = y - y_forced;
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(diff.data(), diff.size());
  return O.colPivHouseholderQr().solve(rhs);
}

}  // namespace rdeepc::testing

#endif  // RDEEPC_TESTS_ORACLES_LTI_ORACLE_HPP_
