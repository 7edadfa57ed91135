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

#ifndef RDEEPC_DATA_HANKEL_HPP_
#define RDEEPC_DATA_HANKEL_HPP_

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace rdeepc::data {

/// Signals are stored one sample per column: a (dim x T) matrix.
using Signal = Eigen::MatrixXd;

/// Block-Hankel matrix of depth L: column j stacks samples j..j+L-1.
inline Eigen::MatrixXd build_hankel(const Signal& seq, int depth) {
  const Eigen::Index dim = seq.rows();
  const Eigen::Index T = seq.cols();
  if (depth <= 0) throw std::invalid_argument("build_hankel: depth must be positive");
  if (T < depth) {
    throw std::invalid_argument("build_hankel: sequence length " + std::to_string(T) +
                                " shorter than depth " + std::to_string(depth));
  }
  const Eigen::Index cols = T - depth + 1;
  Eigen::MatrixXd H(dim * depth, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (int i = 0; i < depth; ++i) H.block(i * dim, j, dim, 1) = seq.col(i + j);
  }
  return H;
}

inline double rank_threshold(const Eigen::VectorXd& singular_values, Eigen::Index rows,
                             Eigen::Index cols) {
  if (singular_values.size() == 0) return 0.0;
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
         singular_values.maxCoeff();
}

inline int numerical_rank(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
  const Eigen::VectorXd& s = svd.singularValues();
  const double tol = rank_threshold(s, M.rows(), M.cols());
  if (s.size() == 0 || s[0] == 0.0) return 0;
  return static_cast<int>((s.array() > tol).count());
}

struct ExcitationCheck {
  bool is_pe = false;
  int numerical_rank = 0;
  int required_rank = 0;
};

/// Persistently exciting of order L <=> H_L(seq) has full row rank.
inline ExcitationCheck check_persistent_excitation(const Signal& seq, int order) {
  const Eigen::MatrixXd H = build_hankel(seq, order);
  ExcitationCheck out;
  out.required_rank = static_cast<int>(H.rows());
  out.numerical_rank = numerical_rank(H);
  out.is_pe = out.numerical_rank == out.required_rank;
  return out;
}

}  // namespace rdeepc::data

#endif  // RDEEPC_DATA_HANKEL_HPP_
