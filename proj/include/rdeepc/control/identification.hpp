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

#ifndef RDEEPC_CONTROL_IDENTIFICATION_HPP_
#define RDEEPC_CONTROL_IDENTIFICATION_HPP_

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rdeepc/data/hankel.hpp"
#include "rdeepc/data/trajectory_log.hpp"

namespace rdeepc::control {

/// x+ = A x + B (u - u0),  y = y0 + C x + D (u - u0).
/// The offsets are zero unless identification was asked to detrend.
struct LinearModel {
  Eigen::MatrixXd A, B, C, D;
  Eigen::VectorXd u0, y0;

  int order() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }

  void validate() const {
    const auto n = A.rows();
    if (A.cols() != n || B.rows() != n || C.cols() != n || D.rows() != C.rows() || D.cols() != B.cols()) {
      throw std::invalid_argument("LinearModel: inconsistent dimensions");
    }
    if (u0.size() != B.cols() || y0.size() != C.rows()) {
      throw std::invalid_argument("LinearModel: offset dimensions do not match");
    }
  }

  double spectral_radius() const {
    if (A.rows() == 0) return 0.0;
    return Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues().cwiseAbs().maxCoeff();
  }

  static LinearModel from(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd D) {
    LinearModel s{std::move(A), std::move(B), std::move(C), std::move(D), {}, {}};
    s.u0 = Eigen::VectorXd::Zero(s.B.cols());
    s.y0 = Eigen::VectorXd::Zero(s.C.rows());
    s.validate();
    return s;
  }
};

/// Output response to u (m x T) from x0.
inline Eigen::MatrixXd simulate(const LinearModel& s, const Eigen::MatrixXd& u, Eigen::VectorXd x) {
  Eigen::MatrixXd y(s.p(), u.cols());
  for (Eigen::Index t = 0; t < u.cols(); ++t) {
    const Eigen::VectorXd du = u.col(t) - s.u0;
    y.col(t) = s.y0 + s.C * x + s.D * du;
    x = s.A * x + s.B * du;
  }
  return y;
}

/// Least-squares initial state from the first w samples.
inline Eigen::VectorXd estimate_initial_state(const LinearModel& s, const Eigen::MatrixXd& u,
                                              const Eigen::MatrixXd& y, int w) {
  const int n = s.order(), p = s.p();
  w = std::min<int>(w, static_cast<int>(u.cols()));
  const Eigen::MatrixXd forced = simulate(s, u.leftCols(w), Eigen::VectorXd::Zero(n));
  Eigen::MatrixXd O(p * w, n);
  Eigen::VectorXd rhs(p * w);
  Eigen::MatrixXd Ak = Eigen::MatrixXd::Identity(n, n);
  for (int k = 0; k < w; ++k) {
    O.middleRows(k * p, p) = s.C * Ak;
    rhs.segment(k * p, p) = y.col(k) - forced.col(k);
    Ak = s.A * Ak;
  }
  return O.completeOrthogonalDecomposition().solve(rhs);
}

/// sqrt(sum |y - yhat|^2 / sum |y - mean(y)|^2); 0 is perfect, about 1 explains nothing.
inline double nrms_fit(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yhat) {
  const Eigen::VectorXd mean = y.rowwise().mean();
  const double den = (y.colwise() - mean).squaredNorm();
  const double num = (y - yhat).squaredNorm();
  if (den <= 0.0) return num <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

struct IdentificationOptions {
  int past = 0;    // block rows of the past window, 0 picks max(2n, 10)
  int future = 0;  // block rows of the future window, 0 uses past
  double holdout_fraction = 0.2;
  bool feedthrough = false;
  bool detrend = false;
};

struct IdentificationResult {
  LinearModel model;
  double fit_nrms = 0.0;        // on the held-out tail
  double spectral_radius = 0.0;
  Eigen::VectorXd singular_values;  // of the projected future outputs
};

/// Subspace-style identification: regress future outputs on past data and
/// future inputs, take the order-n range of the past-explained part as the
/// state sequence, then fit (A, B, C, D) to consecutive states by least
/// squares.  The tail of the log is held out for the fit metric.
inline IdentificationResult identify_state_space(const data::TrajectoryLog& log, int order,
                                                 IdentificationOptions opt = {}) {
  log.validate();
  if (order <= 0) throw std::invalid_argument("identify_state_space: order must be positive");
  if (!(opt.holdout_fraction > 0.0 && opt.holdout_fraction < 0.9)) {
    throw std::invalid_argument("identify_state_space: holdout fraction must be in (0, 0.9)");
  }
  const int m = log.input_dim(), p = log.output_dim();
  const int s = opt.past > 0 ? opt.past : std::max(2 * order, 10);
  const int f = opt.future > 0 ? opt.future : s;
  if (f * p < order) throw std::invalid_argument("identify_state_space: future window too short for the order");
  const int total = log.length();
  const int train = static_cast<int>(std::lround(total * (1.0 - opt.holdout_fraction)));
  const int cols = train - s - f + 1;
  if (cols < (m + p) * s + m * f + order) {
    throw std::invalid_argument("identify_state_space: log too short (" + std::to_string(total) +
                                " samples) for windows " + std::to_string(s) + "/" + std::to_string(f));
  }

  IdentificationResult res;
  LinearModel& mdl = res.model;
  Eigen::MatrixXd u = log.u.leftCols(train);
  Eigen::MatrixXd y = log.y.leftCols(train);
  mdl.u0 = Eigen::VectorXd::Zero(m);
  mdl.y0 = Eigen::VectorXd::Zero(p);
  if (opt.detrend) {
    mdl.u0 = u.rowwise().mean();
    mdl.y0 = y.rowwise().mean();
    u.colwise() -= mdl.u0;
    y.colwise() -= mdl.y0;
  }

  const Eigen::MatrixXd Hu = data::build_hankel(u, s + f);
  const Eigen::MatrixXd Hy = data::build_hankel(y, s + f);
  const Eigen::MatrixXd Uin = Hu.leftCols(cols);
  const int input_rank = data::numerical_rank(Uin);
  if (input_rank < m * (s + f)) {
    throw std::invalid_argument("identify_state_space: rank-deficient regression, input Hankel rank " +
                                std::to_string(input_rank) + " < " + std::to_string(m * (s + f)) +
                                " (input not persistently exciting over the windows)");
  }

  Eigen::MatrixXd Z((m + p) * s + m * f, cols);
  Z << Hu.topRows(m * s).leftCols(cols), Hy.topRows(p * s).leftCols(cols),
      Hu.bottomRows(m * f).leftCols(cols);
  const Eigen::MatrixXd Yf = Hy.bottomRows(p * f).leftCols(cols);
  // Yf ~ L Z; the past block of Z can be rank deficient on exact data, so the
  // minimum-norm solution is used.
  const Eigen::MatrixXd L = Z.transpose().completeOrthogonalDecomposition().solve(Yf.transpose()).transpose();
  const Eigen::MatrixXd O = L.leftCols((m + p) * s) * Z.topRows((m + p) * s);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(O, Eigen::ComputeThinU);
  res.singular_values = svd.singularValues();
  if (res.singular_values.size() < order || res.singular_values[order - 1] <= 0.0) {
    throw std::invalid_argument("identify_state_space: projected outputs have rank below the order");
  }
  const Eigen::MatrixXd Gamma =
      svd.matrixU().leftCols(order) * res.singular_values.head(order).cwiseSqrt().asDiagonal();
  const Eigen::MatrixXd X = Gamma.completeOrthogonalDecomposition().solve(O);  // n x cols

  // Column j of X is the state at time s + j.
  const int J = cols - 1;
  const Eigen::MatrixXd uk = u.middleCols(s, J);
  const Eigen::MatrixXd yk = y.middleCols(s, J);
  Eigen::MatrixXd reg(order + m, J);
  reg << X.leftCols(J), uk;
  const auto reg_cod = reg.transpose().completeOrthogonalDecomposition();
  const Eigen::MatrixXd AB = reg_cod.solve(X.rightCols(J).transpose()).transpose();
  mdl.A = AB.leftCols(order);
  mdl.B = AB.rightCols(m);
  if (opt.feedthrough) {
    const Eigen::MatrixXd CD = reg_cod.solve(yk.transpose()).transpose();
    mdl.C = CD.leftCols(order);
    mdl.D = CD.rightCols(m);
  } else {
    mdl.C = X.leftCols(J).transpose().completeOrthogonalDecomposition().solve(yk.transpose()).transpose();
    mdl.D = Eigen::MatrixXd::Zero(p, m);
  }
  mdl.validate();
  res.spectral_radius = mdl.spectral_radius();

  const int hold = total - train;
  const Eigen::MatrixXd hu = log.u.rightCols(hold);
  const Eigen::MatrixXd hy = log.y.rightCols(hold);
  const Eigen::VectorXd x0 = estimate_initial_state(mdl, hu, hy, std::max(s, order));
  res.fit_nrms = nrms_fit(hy, simulate(mdl, hu, x0));
  return res;
}

}  // namespace rdeepc::control

#endif  // RDEEPC_CONTROL_IDENTIFICATION_HPP_
