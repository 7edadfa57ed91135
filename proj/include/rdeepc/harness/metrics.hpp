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

#ifndef RDEEPC_HARNESS_METRICS_HPP_
#define RDEEPC_HARNESS_METRICS_HPP_

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rdeepc/control/controller.hpp"
#include "rdeepc/control/cost.hpp"
#include "rdeepc/harness/simulation.hpp"

namespace rdeepc::harness {

struct RunMetrics {
  double cost = 0.0;
  double mean_solve_ms = 0.0;
  double median_solve_ms = 0.0;
  double max_solve_ms = 0.0;
  double mean_iterations = 0.0;
  double max_abs_ltr = 0.0;
  int violations = 0;  // samples with |LTR| >= 1
  double first_violation_time = std::numeric_limits<double>::quiet_NaN();
  bool rolled_over = false;
  double rollover_time = std::numeric_limits<double>::quiet_NaN();
  double mean_speed_kmh = 0.0;
  double min_speed_kmh = 0.0;
  double low_speed_dwell = 0.0;  // fraction of samples near the lower speed bound
  int fallbacks = 0;
  int softened = 0;
  int samples = 0;
};

/// Signals of a run as (channels x T) blocks for cost evaluation.
struct RunSignals {
  Eigen::MatrixXd u, y, u_ref, y_ref;
};

inline RunSignals signals_of(const RunLog& log) {
  const auto n = static_cast<Eigen::Index>(log.ticks.size());
  RunSignals s;
  s.u.resize(2, n);
  s.u_ref.resize(2, n);
  s.y.resize(1, n);
  s.y_ref.resize(1, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const TickRecord& t = log.ticks[static_cast<size_t>(k)];
    s.u.col(k) << t.delta_f_deg, t.vx_kmh_cmd;
    s.u_ref.col(k) << t.delta_ref_deg, t.v_ref_kmh;
    s.y(0, k) = t.ltr;
    s.y_ref(0, k) = t.ltr_ref;
  }
  return s;
}

inline double run_cost(const RunLog& log, const control::PredictiveConfig& cfg) {
  const RunSignals s = signals_of(log);
  return control::closed_loop_cost(s.u, s.y, s.u_ref, s.y_ref, cfg.q_weights, cfg.r_weights);
}

/// dwell_margin_kmh: distance above the lower speed bound that still counts
/// as riding the bound.
inline RunMetrics compute_metrics(const RunLog& log, const control::PredictiveConfig& cfg,
                                  double dwell_margin_kmh = 2.0) {
  if (log.ticks.empty()) throw std::invalid_argument("compute_metrics: empty log");
  RunMetrics m;
  m.samples = static_cast<int>(log.ticks.size());
  m.cost = run_cost(log, cfg);
  m.rolled_over = log.rolled_over;
  m.rollover_time = log.rollover_time;

  const double v_low = cfg.input_box.lower.size() > 1 ? cfg.input_box.lower[1] : -std::numeric_limits<double>::infinity();
  std::vector<double> times;
  double speed_sum = 0.0, iter_sum = 0.0;
  int dwell = 0;
  m.min_speed_kmh = std::numeric_limits<double>::infinity();
  for (const TickRecord& t : log.ticks) {
    const double a = std::abs(t.ltr);
    m.max_abs_ltr = std::max(m.max_abs_ltr, a);
    if (a >= 1.0) {
      if (m.violations == 0) m.first_violation_time = t.t;
      ++m.violations;
    }
    const double v = t.vx * 3.6;
    speed_sum += v;
    m.min_speed_kmh = std::min(m.min_speed_kmh, v);
    if (v <= v_low + dwell_margin_kmh) ++dwell;
    if (t.has_diag) {
      times.push_back(t.diag.solve_ms);
      iter_sum += t.diag.iterations;
      m.fallbacks += t.diag.fallback ? 1 : 0;
      m.softened += t.diag.softened ? 1 : 0;
    }
  }
  m.mean_speed_kmh = speed_sum / m.samples;
  m.low_speed_dwell = static_cast<double>(dwell) / m.samples;
  if (!times.empty()) {
    const auto n = static_cast<double>(times.size());
    double sum = 0.0;
    for (double x : times) sum += x;
    m.mean_solve_ms = sum / n;
    m.max_solve_ms = *std::max_element(times.begin(), times.end());
    std::sort(times.begin(), times.end());
    const size_t h = times.size() / 2;
    m.median_solve_ms = times.size() % 2 == 1 ? times[h] : 0.5 * (times[h - 1] + times[h]);
    m.mean_iterations = iter_sum / n;
  }
  return m;
}

/// Process exit status for a finished run: 3 rollover, 4 solver failure,
/// 2 LTR violation without rollover, 0 otherwise.
inline int exit_status(const RunMetrics& m) {
  if (m.rolled_over) return 3;
  if (m.fallbacks > 0) return 4;
  if (m.violations > 0) return 2;
  return 0;
}

}  // namespace rdeepc::harness

#endif  // RDEEPC_HARNESS_METRICS_HPP_
