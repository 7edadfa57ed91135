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

#ifndef RDEEPC_QP_ADMM_SOLVER_HPP_
#define RDEEPC_QP_ADMM_SOLVER_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rdeepc/qp/kkt.hpp"
#include "rdeepc/qp/qp_problem.hpp"

namespace rdeepc::qp {

struct SolverSettings {
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  double eps_prim_inf = 1e-5;
  double eps_dual_inf = 1e-5;
  int max_iter = 20000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  bool adaptive_rho = true;
  int adaptive_rho_interval = 25;
  double adaptive_rho_tolerance = 5.0;
  int scaling_iterations = 10;
  bool polish = false;
  double polish_delta = 1e-6;
  int polish_refine_iterations = 5;
  // Relative shift added before the Cholesky-based PSD test of P.
  double psd_tolerance = 1e-9;
  // Optional observer of the unscaled primal iterate (used by tests).
  std::function<void(int, const Eigen::VectorXd&)> on_iterate;

  void validate() const {
    if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) {
      throw std::invalid_argument("SolverSettings: tolerances must be positive");
    }
    if (max_iter <= 0) throw std::invalid_argument("SolverSettings: max_iter must be positive");
    if (!(rho > 0.0) || !(sigma > 0.0)) {
      throw std::invalid_argument("SolverSettings: rho and sigma must be positive");
    }
    if (!(alpha > 0.0 && alpha < 2.0)) {
      throw std::invalid_argument("SolverSettings: alpha must lie in (0, 2)");
    }
  }
};

namespace detail {

inline double inf_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline double limit_scaling(double v) {
  if (v < 1e-4) return 1.0;
  return std::min(v, 1e4);
}

}  // namespace detail

/// Dense ADMM (operator-splitting) QP solver.
///
/// The reduced KKT matrix P + sigma I + A' diag(rho) A is factorized once and
/// reused across solves; only changes of rho trigger a refactorization.  The
/// linear cost and the bounds can be updated between solves, and each solve
/// is warm-started from the previous iterate unless told otherwise.
class AdmmSolver {
 public:
  explicit AdmmSolver(QpProblem problem, SolverSettings settings = {})
      : problem_(std::move(problem)), settings_(std::move(settings)) {
    settings_.validate();
    problem_.validate();
    problem_.P = (0.5 * (problem_.P + problem_.P.transpose())).eval();
    check_psd();
    n_ = problem_.num_variables();
    m_ = problem_.num_constraints();
    scale();
    scaled_l_ = E_.cwiseProduct(problem_.l);
    scaled_u_ = E_.cwiseProduct(problem_.u);
    rho_ = settings_.rho;
    assign_rho_vector();
    factorize();
    cold_start();
  }

  const QpProblem& problem() const { return problem_; }
  const SolverSettings& settings() const { return settings_; }
  int factorizations() const { return factorizations_; }
  double rho() const { return rho_; }

  void update_linear_cost(const Eigen::VectorXd& q) {
    if (q.size() != n_) throw std::invalid_argument("update_linear_cost: size mismatch");
    if (!q.allFinite()) throw std::invalid_argument("update_linear_cost: non-finite q");
    problem_.q = q;
    scaled_q_ = c_ * D_.cwiseProduct(q);
  }

  void update_bounds(const Eigen::VectorXd& l, const Eigen::VectorXd& u) {
    if (l.size() != m_ || u.size() != m_) {
      throw std::invalid_argument("update_bounds: size mismatch");
    }
    problem_.l = l;
    problem_.u = u;
    problem_.validate();
    scaled_l_ = E_.cwiseProduct(l);
    scaled_u_ = E_.cwiseProduct(u);
    const Eigen::VectorXd old = rho_vec_;
    assign_rho_vector();
    if (!rho_vec_.isApprox(old)) factorize();
  }

  void cold_start() {
    x_ = Eigen::VectorXd::Zero(n_);
    z_ = Eigen::VectorXd::Zero(m_);
    y_ = Eigen::VectorXd::Zero(m_);
  }

  /// Sets the starting iterate from an unscaled primal/dual pair.
  void warm_start(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != n_ || y.size() != m_) {
      throw std::invalid_argument("warm_start: size mismatch");
    }
    x_ = x.cwiseQuotient(D_);
    y_ = c_ * y.cwiseQuotient(E_);
    z_ = As_ * x_;
  }

  QpSolution solve() {
    const auto t0 = std::chrono::steady_clock::now();
    QpSolution sol = iterate();
    if (settings_.polish && sol.status == QpStatus::kSolved) polish(sol);
    sol.objective = problem_.objective(sol.x);
    sol.solve_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
  }

 private:
  void check_psd() const {
    const auto n = problem_.P.rows();
    if (n == 0) return;
    const double scale = std::max(1.0, problem_.P.cwiseAbs().maxCoeff());
    Eigen::MatrixXd shifted = problem_.P;
    shifted.diagonal().array() += settings_.psd_tolerance * scale * static_cast<double>(n);
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("AdmmSolver: Hessian P is not positive semidefinite");
    }
  }

  void scale() {
    D_ = Eigen::VectorXd::Ones(n_);
    E_ = Eigen::VectorXd::Ones(m_);
    c_ = 1.0;
    Ps_ = problem_.P;
    As_ = problem_.A;
    Eigen::VectorXd qs = problem_.q;
    for (int it = 0; it < settings_.scaling_iterations; ++it) {
      Eigen::VectorXd dt(n_);
      for (int j = 0; j < n_; ++j) {
        double nrm = Ps_.col(j).cwiseAbs().maxCoeff();
        if (m_ > 0) nrm = std::max(nrm, As_.col(j).cwiseAbs().maxCoeff());
        dt[j] = 1.0 / std::sqrt(detail::limit_scaling(nrm));
      }
      Eigen::VectorXd et(m_);
      for (int i = 0; i < m_; ++i) {
        et[i] = 1.0 / std::sqrt(detail::limit_scaling(As_.row(i).cwiseAbs().maxCoeff()));
      }
      Ps_ = dt.asDiagonal() * Ps_ * dt.asDiagonal();
      As_ = et.asDiagonal() * As_ * dt.asDiagonal();
      qs = dt.cwiseProduct(qs);
      D_ = D_.cwiseProduct(dt);
      E_ = E_.cwiseProduct(et);

      double mean_col = 0.0;
      for (int j = 0; j < n_; ++j) mean_col += Ps_.col(j).cwiseAbs().maxCoeff();
      mean_col /= std::max(1, n_);
      const double ct =
          1.0 / detail::limit_scaling(std::max(mean_col, detail::inf_norm(qs)));
      Ps_ *= ct;
      qs *= ct;
      c_ *= ct;
    }
    scaled_q_ = qs;
  }

  void assign_rho_vector() {
    rho_vec_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      const double l = problem_.l[i];
      const double u = problem_.u[i];
      if (!std::isfinite(l) && !std::isfinite(u)) {
        rho_vec_[i] = kRhoMin;
      } else if (u - l < 1e-4) {
        rho_vec_[i] = std::min(kEqualityRhoFactor * rho_, kRhoMax);
      } else {
        rho_vec_[i] = rho_;
      }
    }
  }

  void factorize() {
    Eigen::MatrixXd K = Ps_;
    K.diagonal().array() += settings_.sigma;
    if (m_ > 0) {
      const Eigen::MatrixXd weighted = As_.transpose() * rho_vec_.cwiseSqrt().asDiagonal();
      K.selfadjointView<Eigen::Lower>().rankUpdate(weighted);
    }
    llt_.compute(K);
    if (llt_.info() != Eigen::Success) {
      throw std::runtime_error("AdmmSolver: KKT factorization failed");
    }
    ++factorizations_;
  }

  bool maybe_update_rho(const Eigen::VectorXd& ax, const Eigen::VectorXd& px,
                        const Eigen::VectorXd& aty) {
    const double prim = detail::inf_norm(ax - z_);
    const double dual = detail::inf_norm(px + scaled_q_ + aty);
    const double prim_norm = std::max(detail::inf_norm(ax), detail::inf_norm(z_));
    const double dual_norm = std::max(
        {detail::inf_norm(px), detail::inf_norm(aty), detail::inf_norm(scaled_q_)});
    const double ratio = (prim / (prim_norm + 1e-10)) / (dual / (dual_norm + 1e-10) + 1e-300);
    const double rho_new = std::clamp(rho_ * std::sqrt(ratio), kRhoMin, kRhoMax);
    if (rho_new > settings_.adaptive_rho_tolerance * rho_ ||
        rho_new < rho_ / settings_.adaptive_rho_tolerance) {
      rho_ = rho_new;
      assign_rho_vector();
      factorize();
      return true;
    }
    return false;
  }

  bool primal_infeasible(const Eigen::VectorXd& dy, const Eigen::VectorXd& at_dy) const {
    Eigen::VectorXd d = dy;
    for (int i = 0; i < m_; ++i) {
      if (!std::isfinite(scaled_u_[i]) && d[i] > 0.0) d[i] = 0.0;
      if (!std::isfinite(scaled_l_[i]) && d[i] < 0.0) d[i] = 0.0;
    }
    const double norm = detail::inf_norm(E_.cwiseProduct(d));
    if (norm < 1e-30) return false;
    const double eps = settings_.eps_prim_inf * norm;
    if (detail::inf_norm(at_dy.cwiseQuotient(D_)) > eps) return false;
    double support = 0.0;
    for (int i = 0; i < m_; ++i) {
      if (d[i] > 0.0) support += scaled_u_[i] * d[i];
      if (d[i] < 0.0) support += scaled_l_[i] * d[i];
    }
    return support < -eps;
  }

  bool dual_infeasible(const Eigen::VectorXd& dx, const Eigen::VectorXd& p_dx,
                       const Eigen::VectorXd& a_dx) const {
    const double norm = detail::inf_norm(D_.cwiseProduct(dx));
    if (norm < 1e-30) return false;
    const double eps = settings_.eps_dual_inf * norm;
    if (detail::inf_norm(p_dx.cwiseQuotient(D_)) > c_ * eps) return false;
    if (scaled_q_.dot(dx) > -c_ * eps) return false;
    for (int i = 0; i < m_; ++i) {
      const double v = a_dx[i] / E_[i];
      if (std::isfinite(scaled_u_[i]) && v > eps) return false;
      if (std::isfinite(scaled_l_[i]) && v < -eps) return false;
    }
    return true;
  }

  QpSolution iterate() {
    const double sigma = settings_.sigma;
    const double alpha = settings_.alpha;
    Eigen::VectorXd px = Ps_ * x_;
    Eigen::VectorXd ax = As_ * x_;
    Eigen::VectorXd aty = As_.transpose() * y_;

    QpSolution sol;
    sol.status = QpStatus::kMaxIterations;
    Eigen::VectorXd rhs(n_), xt(n_), zt(m_), pxt(n_), zrel(m_);
    int k = 1;
    for (; k <= settings_.max_iter; ++k) {
      rhs = sigma * x_ - scaled_q_;
      if (m_ > 0) rhs.noalias() += As_.transpose() * (rho_vec_.cwiseProduct(z_) - y_);
      xt = llt_.solve(rhs);
      zt.noalias() = As_ * xt;
      pxt = rhs - sigma * xt;
      if (m_ > 0) pxt.noalias() -= As_.transpose() * rho_vec_.cwiseProduct(zt);

      const Eigen::VectorXd x_prev = x_;
      const Eigen::VectorXd y_prev = y_;
      const Eigen::VectorXd px_prev = px;
      const Eigen::VectorXd ax_prev = ax;
      const Eigen::VectorXd aty_prev = aty;

      x_ = alpha * xt + (1.0 - alpha) * x_prev;
      zrel = alpha * zt + (1.0 - alpha) * z_;
      z_ = (zrel + y_.cwiseQuotient(rho_vec_)).cwiseMax(scaled_l_).cwiseMin(scaled_u_);
      y_ += rho_vec_.cwiseProduct(zrel - z_);
      px = alpha * pxt + (1.0 - alpha) * px_prev;
      ax = alpha * zt + (1.0 - alpha) * ax_prev;
      aty.noalias() = As_.transpose() * y_;

      if (settings_.on_iterate) settings_.on_iterate(k, D_.cwiseProduct(x_));

      if (converged(px, ax, aty, sol)) {
        // Confirm with freshly computed products before declaring success.
        px.noalias() = Ps_ * x_;
        ax.noalias() = As_ * x_;
        if (converged(px, ax, aty, sol)) {
          sol.status = QpStatus::kSolved;
          break;
        }
      }
      if (m_ > 0 && primal_infeasible(y_ - y_prev, aty - aty_prev)) {
        sol.status = QpStatus::kPrimalInfeasible;
        break;
      }
      if (dual_infeasible(x_ - x_prev, px - px_prev, ax - ax_prev)) {
        sol.status = QpStatus::kDualInfeasible;
        break;
      }
      if (settings_.adaptive_rho && k % settings_.adaptive_rho_interval == 0) {
        maybe_update_rho(ax, px, aty);
      }
    }
    sol.iterations = std::min(k, settings_.max_iter);
    sol.x = D_.cwiseProduct(x_);
    sol.y = E_.cwiseProduct(y_) / c_;
    return sol;
  }

  bool converged(const Eigen::VectorXd& px, const Eigen::VectorXd& ax,
                 const Eigen::VectorXd& aty, QpSolution& sol) const {
    const Eigen::VectorXd e_inv_ax = ax.cwiseQuotient(E_);
    const Eigen::VectorXd e_inv_z = z_.cwiseQuotient(E_);
    sol.primal_residual = detail::inf_norm(e_inv_ax - e_inv_z);
    const Eigen::VectorXd d_px = px.cwiseQuotient(D_) / c_;
    const Eigen::VectorXd d_aty = aty.cwiseQuotient(D_) / c_;
    const Eigen::VectorXd d_q = scaled_q_.cwiseQuotient(D_) / c_;
    sol.dual_residual = detail::inf_norm(d_px + d_q + d_aty);
    const double eps_prim =
        settings_.eps_abs +
        settings_.eps_rel * std::max(detail::inf_norm(e_inv_ax), detail::inf_norm(e_inv_z));
    const double eps_dual =
        settings_.eps_abs +
        settings_.eps_rel * std::max({detail::inf_norm(d_px), detail::inf_norm(d_aty),
                                      detail::inf_norm(d_q)});
    return sol.primal_residual <= eps_prim && sol.dual_residual <= eps_dual;
  }

  // Solves the equality-constrained KKT system on the detected active set and
  // keeps the result when it does not worsen the residuals.
  void polish(QpSolution& sol) const {
    const QpProblem& p = problem_;
    const Eigen::VectorXd ax = p.A * sol.x;
    std::vector<int> active;
    Eigen::VectorXd target(m_);
    for (int i = 0; i < m_; ++i) {
      if (ax[i] - p.l[i] < -sol.y[i]) {
        active.push_back(i);
        target[i] = p.l[i];
      } else if (p.u[i] - ax[i] < sol.y[i]) {
        active.push_back(i);
        target[i] = p.u[i];
      }
    }
    const int na = static_cast<int>(active.size());
    const double delta = settings_.polish_delta;
    Eigen::MatrixXd Aa(na, n_);
    Eigen::VectorXd ba(na);
    for (int k = 0; k < na; ++k) {
      Aa.row(k) = p.A.row(active[k]);
      ba[k] = target[active[k]];
    }
    Eigen::MatrixXd M = p.P;
    M.diagonal().array() += delta;
    Eigen::LLT<Eigen::MatrixXd> m_llt(M);
    if (m_llt.info() != Eigen::Success) return;
    const Eigen::MatrixXd minv_at = m_llt.solve(Aa.transpose());
    Eigen::MatrixXd S = Aa * minv_at;
    S.diagonal().array() += delta;
    Eigen::LLT<Eigen::MatrixXd> s_llt(S);
    if (s_llt.info() != Eigen::Success) return;

    auto reg_solve = [&](const Eigen::VectorXd& r1, const Eigen::VectorXd& r2,
                         Eigen::VectorXd& dx, Eigen::VectorXd& dy) {
      const Eigen::VectorXd minv_r1 = m_llt.solve(r1);
      dy = s_llt.solve(Aa * minv_r1 - r2);
      dx = minv_r1 - minv_at * dy;
    };
    Eigen::VectorXd x, ya;
    reg_solve(-p.q, ba, x, ya);
    for (int it = 0; it < settings_.polish_refine_iterations; ++it) {
      const Eigen::VectorXd r1 = -p.q - (p.P * x + Aa.transpose() * ya);
      const Eigen::VectorXd r2 = ba - Aa * x;
      Eigen::VectorXd dx, dy;
      reg_solve(r1, r2, dx, dy);
      x += dx;
      ya += dy;
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
    for (int k = 0; k < na; ++k) y[active[k]] = ya[k];

    const KktResiduals before = kkt_residuals(p, sol.x, sol.y);
    const KktResiduals after = kkt_residuals(p, x, y);
    const double tol = settings_.eps_abs;
    const bool better = after.primal <= std::max(before.primal, tol) &&
                        after.dual <= std::max(before.dual, tol);
    if (better && x.allFinite() && y.allFinite()) {
      sol.x = x;
      sol.y = y;
      sol.primal_residual = after.primal;
      sol.dual_residual = after.dual;
      sol.polished = true;
    }
  }

  static constexpr double kRhoMin = 1e-6;
  static constexpr double kRhoMax = 1e6;
  static constexpr double kEqualityRhoFactor = 1e3;

  QpProblem problem_;
  SolverSettings settings_;
  int n_ = 0;
  int m_ = 0;

  Eigen::MatrixXd Ps_;
  Eigen::MatrixXd As_;
  Eigen::VectorXd scaled_q_;
  Eigen::VectorXd scaled_l_;
  Eigen::VectorXd scaled_u_;
  Eigen::VectorXd D_;
  Eigen::VectorXd E_;
  double c_ = 1.0;

  double rho_ = 0.1;
  Eigen::VectorXd rho_vec_;
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt_;
  int factorizations_ = 0;

  Eigen::VectorXd x_;
  Eigen::VectorXd z_;
  Eigen::VectorXd y_;
};

/// One-shot convenience wrapper.
inline QpSolution solve(const QpProblem& problem, const SolverSettings& settings = {},
                        const std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>>&
                            warm = std::nullopt) {
  AdmmSolver solver(problem, settings);
  if (warm) solver.warm_start(warm->first, warm->second);
  return solver.solve();
}

}  // namespace rdeepc::qp

#endif  // RDEEPC_QP_ADMM_SOLVER_HPP_
