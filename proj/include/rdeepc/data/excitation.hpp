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

#ifndef RDEEPC_DATA_EXCITATION_HPP_
#define RDEEPC_DATA_EXCITATION_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "rdeepc/data/hankel.hpp"

namespace rdeepc::data {

struct ExcitationConfig {
  std::vector<double> stddev;  // per input channel, in channel units
  std::uint64_t seed = 1;
};

/// Adds seeded white Gaussian noise to each channel of u_ref.
inline Signal inject_excitation(const Signal& u_ref, const ExcitationConfig& cfg) {
  if (static_cast<Eigen::Index>(cfg.stddev.size()) != u_ref.rows()) {
    throw std::invalid_argument("inject_excitation: one stddev per channel required");
  }
  for (double s : cfg.stddev) {
    if (!(s >= 0.0)) throw std::invalid_argument("inject_excitation: negative stddev");
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Signal out = u_ref;
  for (Eigen::Index t = 0; t < out.cols(); ++t) {
    for (Eigen::Index c = 0; c < out.rows(); ++c) {
      const double draw = normal(rng);
      out(c, t) += cfg.stddev[static_cast<size_t>(c)] * draw;
    }
  }
  return out;
}

/// Streaming variant used inside closed-loop data collection.
class ExcitationSource {
 public:
  explicit ExcitationSource(ExcitationConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {}

  Eigen::VectorXd next() {
    Eigen::VectorXd d(static_cast<Eigen::Index>(cfg_.stddev.size()));
    for (Eigen::Index c = 0; c < d.size(); ++c) {
      d[c] = cfg_.stddev[static_cast<size_t>(c)] * normal_(rng_);
    }
    return d;
  }

 private:
  ExcitationConfig cfg_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rdeepc::data

#endif  // RDEEPC_DATA_EXCITATION_HPP_
