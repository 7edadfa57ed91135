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

#ifndef RDEEPC_HARNESS_REPORT_HPP_
#define RDEEPC_HARNESS_REPORT_HPP_

#include <fmt/format.h>
#include <fmt/os.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "rdeepc/harness/metrics.hpp"

namespace rdeepc::harness {

struct ReportRow {
  std::string scenario;
  std::string controller;
  RunMetrics metrics;
};

namespace detail {
inline std::string time_or_dash(double t) { return std::isfinite(t) ? fmt::format("{:.2f}", t) : "-"; }
}  // namespace detail

/// Aligned plain-text table, one row per run.
inline std::string render_table(const std::vector<ReportRow>& rows) {
  std::string out = fmt::format("{:<16} {:<10} {:>12} {:>10} {:>10} {:>8} {:>6} {:>9} {:>9} {:>8} {:>7}\n", "scenario",
                                "controller", "cost", "median_ms", "max_ms", "max|LTR|", "viol", "rollover",
                                "mean_kmh", "dwell", "fallbk");
  for (const ReportRow& r : rows) {
    const RunMetrics& m = r.metrics;
    out += fmt::format("{:<16} {:<10} {:>12.4f} {:>10.3f} {:>10.3f} {:>8.3f} {:>6} {:>9} {:>9.2f} {:>8.3f} {:>7}\n",
                       r.scenario, r.controller, m.cost, m.median_solve_ms, m.max_solve_ms, m.max_abs_ltr,
                       m.violations, m.rolled_over ? detail::time_or_dash(m.rollover_time) : "no",
                       m.mean_speed_kmh, m.low_speed_dwell, m.fallbacks);
  }
  return out;
}

inline void write_report_csv(const std::filesystem::path& path, const std::vector<ReportRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto out = fmt::output_file(path.string());
  out.print(
      "scenario,controller,cost,mean_solve_ms,median_solve_ms,max_solve_ms,mean_iterations,max_abs_ltr,"
      "violations,first_violation_time,rolled_over,rollover_time,mean_speed_kmh,min_speed_kmh,low_speed_dwell,"
      "fallbacks,softened,samples\n");
  for (const ReportRow& r : rows) {
    const RunMetrics& m = r.metrics;
    out.print("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.scenario, r.controller, m.cost,
              m.mean_solve_ms, m.median_solve_ms, m.max_solve_ms, m.mean_iterations, m.max_abs_ltr, m.violations,
              m.first_violation_time, m.rolled_over ? 1 : 0, m.rollover_time, m.mean_speed_kmh, m.min_speed_kmh,
              m.low_speed_dwell, m.fallbacks, m.softened, m.samples);
  }
}

}  // namespace rdeepc::harness

#endif  // RDEEPC_HARNESS_REPORT_HPP_
