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

#ifndef RDEEPC_DATA_LIBRARY_HPP_
#define RDEEPC_DATA_LIBRARY_HPP_

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdeepc/data/hankel.hpp"
#include "rdeepc/data/trajectory_log.hpp"

namespace rdeepc::data {

struct Provenance {
  std::uint64_t seed = 0;
  std::string source_hash;  // FNV-1a of the source log(s), hex
};

/// Past/future partition of the input and output Hankel matrices.
struct DataLibrary {
  Eigen::MatrixXd Up, Uf, Yp, Yf;
  int m = 0;
  int p = 0;
  int t_ini = 0;
  int horizon = 0;
  Provenance provenance;

  int depth() const { return t_ini + horizon; }
  int columns() const { return static_cast<int>(Up.cols()); }
  int rows() const { return (m + p) * depth(); }

  /// [Up; Uf; Yp; Yf], i.e. [H_L(u); H_L(y)].
  Eigen::MatrixXd stacked() const {
    Eigen::MatrixXd H(rows(), columns());
    H << Up, Uf, Yp, Yf;
    return H;
  }

  void validate() const {
    if (m <= 0 || p <= 0 || t_ini <= 0 || horizon <= 0) {
      throw std::invalid_argument("DataLibrary: dimensions must be positive");
    }
    const Eigen::Index K = Up.cols();
    if (Up.rows() != m * t_ini || Uf.rows() != m * horizon || Yp.rows() != p * t_ini ||
        Yf.rows() != p * horizon) {
      throw std::invalid_argument("DataLibrary: block row counts inconsistent with (m, p, T_ini, N)");
    }
    if (Uf.cols() != K || Yp.cols() != K || Yf.cols() != K || K == 0) {
      throw std::invalid_argument("DataLibrary: blocks must share a nonzero column count");
    }
  }
};

struct ReducedLibrary {
  DataLibrary blocks;  // column count q
  Eigen::VectorXd singular_values;
  int source_columns = 0;

  int columns() const { return blocks.columns(); }
};

/// Splits a stacked [H_L(u); H_L(y)] matrix back into the four blocks.
inline DataLibrary split_stacked(const Eigen::MatrixXd& H, int m, int p, int t_ini, int horizon) {
  DataLibrary lib;
  lib.m = m;
  lib.p = p;
  lib.t_ini = t_ini;
  lib.horizon = horizon;
  if (H.rows() != (m + p) * (t_ini + horizon)) {
    throw std::invalid_argument("split_stacked: row count mismatch");
  }
  Eigen::Index r = 0;
  lib.Up = H.middleRows(r, m * t_ini);
  r += m * t_ini;
  lib.Uf = H.middleRows(r, m * horizon);
  r += m * horizon;
  lib.Yp = H.middleRows(r, p * t_ini);
  r += p * t_ini;
  lib.Yf = H.middleRows(r, p * horizon);
  return lib;
}

struct PartitionOptions {
  /// When set, warn if the input is not PE of order n_bound + T_ini + N.
  std::optional<int> n_bound;
  std::vector<std::string>* warnings = nullptr;
};

inline DataLibrary partition(const TrajectoryLog& log, int t_ini, int horizon,
                             const PartitionOptions& opts = {}) {
  log.validate();
  if (t_ini <= 0 || horizon <= 0) {
    throw std::invalid_argument("partition: T_ini and N must be positive");
  }
  const int L = t_ini + horizon;
  if (log.length() < L) {
    throw std::invalid_argument("partition: log of length " + std::to_string(log.length()) +
                                " is shorter than T_ini + N = " + std::to_string(L));
  }
  const int m = log.input_dim();
  const int p = log.output_dim();
  if (opts.n_bound) {
    const int order = *opts.n_bound + L;
    std::string msg;
    if (log.length() < order) {
      msg = "input too short to test persistent excitation of order " + std::to_string(order);
    } else {
      const ExcitationCheck chk = check_persistent_excitation(log.u, order);
      if (!chk.is_pe) {
        msg = "input not persistently exciting of order " + std::to_string(order) + " (rank " +
              std::to_string(chk.numerical_rank) + " of " + std::to_string(chk.required_rank) + ")";
      }
    }
    if (!msg.empty() && opts.warnings) opts.warnings->push_back(msg);
  }
  const Eigen::MatrixXd Hu = build_hankel(log.u, L);
  const Eigen::MatrixXd Hy = build_hankel(log.y, L);
  DataLibrary lib;
  lib.m = m;
  lib.p = p;
  lib.t_ini = t_ini;
  lib.horizon = horizon;
  lib.Up = Hu.topRows(m * t_ini);
  lib.Uf = Hu.bottomRows(m * horizon);
  lib.Yp = Hy.topRows(p * t_ini);
  lib.Yf = Hy.bottomRows(p * horizon);
  return lib;
}

/// Joins the columns of libraries built from separate logs.
inline DataLibrary concatenate(const std::vector<DataLibrary>& parts) {
  if (parts.empty()) throw std::invalid_argument("concatenate: no libraries");
  const DataLibrary& first = parts.front();
  Eigen::Index K = 0;
  for (const auto& part : parts) {
    part.validate();
    if (part.m != first.m || part.p != first.p || part.t_ini != first.t_ini ||
        part.horizon != first.horizon) {
      throw std::invalid_argument("concatenate: library dimensions differ");
    }
    K += part.columns();
  }
  DataLibrary out = first;
  out.Up.resize(first.Up.rows(), K);
  out.Uf.resize(first.Uf.rows(), K);
  out.Yp.resize(first.Yp.rows(), K);
  out.Yf.resize(first.Yf.rows(), K);
  Eigen::Index c = 0;
  for (const auto& part : parts) {
    const Eigen::Index k = part.columns();
    out.Up.middleCols(c, k) = part.Up;
    out.Uf.middleCols(c, k) = part.Uf;
    out.Yp.middleCols(c, k) = part.Yp;
    out.Yf.middleCols(c, k) = part.Yf;
    c += k;
  }
  return out;
}

struct ReductionTarget {
  /// Number of retained columns; defaults to min(rows, K).
  std::optional<int> q;
  /// Optional energy truncation: keep the smallest q with discarded energy <= tolerance.
  std::optional<double> energy_tolerance;
};

/// SVD reduction of the stacked library: H V1 = W1 S1.
inline ReducedLibrary svd_reduce(const DataLibrary& lib, const ReductionTarget& target = {}) {
  lib.validate();
  const Eigen::MatrixXd H = lib.stacked();
  const int max_q = static_cast<int>(std::min(H.rows(), H.cols()));
  int q = target.q.value_or(max_q);
  if (q <= 0) throw std::invalid_argument("svd_reduce: q must be positive");
  if (q > lib.columns()) throw std::invalid_argument("svd_reduce: q exceeds column count");
  q = std::min(q, max_q);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  const double tol = rank_threshold(s, H.rows(), H.cols());
  const int rank = s.size() == 0 || s[0] == 0.0 ? 0 : static_cast<int>((s.array() > tol).count());
  if (rank == 0) throw std::invalid_argument("svd_reduce: library is numerically zero");
  q = std::min(q, rank);

  if (target.energy_tolerance) {
    const double e = *target.energy_tolerance;
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("svd_reduce: energy tolerance in [0,1)");
    const double total = s.head(rank).squaredNorm();
    double kept = 0.0;
    int needed = 0;
    while (needed < q && kept < (1.0 - e) * total) kept += s[needed] * s[needed], ++needed;
    q = std::max(needed, 1);
  }

  const Eigen::MatrixXd Ht = svd.matrixU().leftCols(q) * s.head(q).asDiagonal();
  ReducedLibrary out;
  out.blocks = split_stacked(Ht, lib.m, lib.p, lib.t_ini, lib.horizon);
  out.blocks.provenance = lib.provenance;
  out.singular_values = s.head(q);
  out.source_columns = lib.columns();
  return out;
}

/// Orders a length-L trajectory like the library rows: [u_ini; u_f; y_ini; y_f].
/// u is (m x L) and y is (p x L), one sample per column.
inline Eigen::VectorXd stack_trajectory(const Eigen::MatrixXd& u, const Eigen::MatrixXd& y) {
  if (u.cols() != y.cols()) throw std::invalid_argument("stack_trajectory: length mismatch");
  Eigen::VectorXd w(u.size() + y.size());
  w << Eigen::Map<const Eigen::VectorXd>(u.data(), u.size()),
      Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
  return w;
}

/// Relative least-squares residual min_g |H g - w| / |w|.
inline double verify_trajectory_membership(const DataLibrary& lib, const Eigen::MatrixXd& u,
                                           const Eigen::MatrixXd& y) {
  lib.validate();
  if (u.rows() != lib.m || y.rows() != lib.p || u.cols() != lib.depth() ||
      y.cols() != lib.depth()) {
    throw std::invalid_argument("verify_trajectory_membership: trajectory shape mismatch");
  }
  const Eigen::VectorXd w = stack_trajectory(u, y);
  const double wn = w.norm();
  if (wn == 0.0) return 0.0;
  const Eigen::MatrixXd H = lib.stacked();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  const double tol = rank_threshold(s, H.rows(), H.cols());
  const Eigen::Index r = s.size() == 0 || s[0] == 0.0 ? 0 : (s.array() > tol).count();
  const Eigen::MatrixXd Ur = svd.matrixU().leftCols(r);
  const Eigen::VectorXd resid = w - Ur * (Ur.transpose() * w);
  return resid.norm() / wn;
}

inline double verify_trajectory_membership(const ReducedLibrary& lib, const Eigen::MatrixXd& u,
                                           const Eigen::MatrixXd& y) {
  return verify_trajectory_membership(lib.blocks, u, y);
}

}  // namespace rdeepc::data

#endif  // RDEEPC_DATA_LIBRARY_HPP_
