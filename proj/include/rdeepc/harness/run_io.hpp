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

#ifndef RDEEPC_HARNESS_RUN_IO_HPP_
#define RDEEPC_HARNESS_RUN_IO_HPP_

#include <fmt/format.h>
#include <fmt/os.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rdeepc/data/trajectory_log.hpp"
#include "rdeepc/harness/metrics.hpp"
#include "rdeepc/harness/simulation.hpp"

namespace rdeepc::harness {

namespace fs = std::filesystem;

inline constexpr const char* kTrajectoryHeader =
    "t,delta_f_deg,vx_kmh_cmd,vx_mps,vy_mps,r,phi,p,ltr,fz_fl,fz_fr,fz_rl,fz_rr";
inline constexpr const char* kReferenceHeader = "t,delta_ref_deg,v_ref_kmh,ltr_ref";
inline constexpr const char* kDiagnosticsHeader = "t,solve_ms,iters,objective,sigma_y_norm,fallback_flag";
inline constexpr const char* kDataLogHeader = "t,delta_f_deg,vx_kmh_cmd,ltr";

namespace detail {

inline std::vector<std::vector<double>> read_csv(const fs::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw std::runtime_error(path.string() + ": unexpected header");
  }
  const auto width = static_cast<size_t>(std::count(header.begin(), header.end(), ',') + 1);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != width) {
      throw std::runtime_error(fmt::format("{}: row {} has {} fields", path.string(), rows.size() + 1, row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

/// File stem shared by the CSVs of one run.
inline std::string run_stem(const RunLog& log) { return log.scenario + "_" + log.controller; }

/// Writes <stem>_trajectory.csv, <stem>_refs.csv and, for controllers,
/// <stem>_diagnostics.csv.  Values use shortest round-trip formatting.
inline void write_run(const fs::path& dir, const RunLog& log) {
  fs::create_directories(dir);
  const std::string stem = run_stem(log);
  {
    auto out = fmt::output_file((dir / (stem + "_trajectory.csv")).string());
    out.print("{}\n", kTrajectoryHeader);
    for (const TickRecord& t : log.ticks) {
      out.print("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", t.t, t.delta_f_deg, t.vx_kmh_cmd, t.vx, t.vy, t.r,
                t.phi, t.p, t.ltr, t.fz[0], t.fz[1], t.fz[2], t.fz[3]);
    }
  }
  {
    auto out = fmt::output_file((dir / (stem + "_refs.csv")).string());
    out.print("{}\n", kReferenceHeader);
    for (const TickRecord& t : log.ticks) out.print("{},{},{},{}\n", t.t, t.delta_ref_deg, t.v_ref_kmh, t.ltr_ref);
  }
  bool any_diag = false;
  for (const TickRecord& t : log.ticks) any_diag = any_diag || t.has_diag;
  if (any_diag) {
    auto out = fmt::output_file((dir / (stem + "_diagnostics.csv")).string());
    out.print("{}\n", kDiagnosticsHeader);
    for (const TickRecord& t : log.ticks) {
      if (!t.has_diag) continue;
      out.print("{},{},{},{},{},{}\n", t.t, t.diag.solve_ms, t.diag.iterations,
                t.diag.objective, t.diag.sigma_y_norm, t.diag.fallback ? 1 : 0);
    }
  }
}

/// Reads back the trajectory and references of a run (diagnostics are not
/// needed to recompute the cost).
inline RunLog read_run(const fs::path& dir, const std::string& scenario, const std::string& controller) {
  RunLog log;
  log.scenario = scenario;
  log.controller = controller;
  const std::string stem = scenario + "_" + controller;
  const auto traj = detail::read_csv(dir / (stem + "_trajectory.csv"), kTrajectoryHeader);
  const auto refs = detail::read_csv(dir / (stem + "_refs.csv"), kReferenceHeader);
  if (traj.size() != refs.size()) throw std::runtime_error(stem + ": trajectory and reference lengths differ");
  for (size_t k = 0; k < traj.size(); ++k) {
    const auto& a = traj[k];
    const auto& b = refs[k];
    TickRecord t;
    t.t = a[0];
    t.delta_f_deg = a[1];
    t.vx_kmh_cmd = a[2];
    t.vx = a[3];
    t.vy = a[4];
    t.r = a[5];
    t.phi = a[6];
    t.p = a[7];
    t.ltr = a[8];
    t.fz = {a[9], a[10], a[11], a[12]};
    t.delta_ref_deg = b[1];
    t.v_ref_kmh = b[2];
    t.ltr_ref = b[3];
    log.ticks.push_back(t);
  }
  if (log.ticks.size() > 1) log.sample_time = log.ticks[1].t - log.ticks[0].t;
  const fs::path diag_path = dir / (stem + "_diagnostics.csv");
  if (fs::exists(diag_path)) {
    // times are written with round-trip precision, so exact lookup works
    std::map<double, size_t> index;
    for (size_t k = 0; k < log.ticks.size(); ++k) index.emplace(log.ticks[k].t, k);
    for (const auto& d : detail::read_csv(diag_path, kDiagnosticsHeader)) {
      const auto it = index.find(d[0]);
      if (it == index.end()) throw std::runtime_error(stem + ": diagnostics time not in trajectory");
      TickRecord& t = log.ticks[it->second];
      t.has_diag = true;
      t.diag.solve_ms = d[1];
      t.diag.iterations = static_cast<int>(d[2]);
      t.diag.objective = d[3];
      t.diag.sigma_y_norm = d[4];
      t.diag.fallback = d[5] != 0.0;
    }
  }
  return log;
}

inline void write_data_log(const fs::path& path, const data::TrajectoryLog& log) {
  if (log.input_dim() != 2 || log.output_dim() != 1) {
    throw std::invalid_argument("write_data_log: expected two inputs and one output");
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto out = fmt::output_file(path.string());
  out.print("{}\n", kDataLogHeader);
  for (int k = 0; k < log.length(); ++k) {
    out.print("{},{},{},{}\n", k * log.sample_time, log.u(0, k), log.u(1, k), log.y(0, k));
  }
}

inline data::TrajectoryLog read_data_log(const fs::path& path) {
  const auto rows = detail::read_csv(path, kDataLogHeader);
  if (rows.size() < 2) throw std::runtime_error(path.string() + ": too few samples");
  data::TrajectoryLog log;
  const auto n = static_cast<Eigen::Index>(rows.size());
  log.u.resize(2, n);
  log.y.resize(1, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& r = rows[static_cast<size_t>(k)];
    log.u(0, k) = r[1];
    log.u(1, k) = r[2];
    log.y(0, k) = r[3];
  }
  log.sample_time = rows[1][0] - rows[0][0];
  log.validate();
  return log;
}

inline nlohmann::json to_json(const RunMetrics& m) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"cost", m.cost},
          {"mean_solve_ms", m.mean_solve_ms},
          {"median_solve_ms", m.median_solve_ms},
          {"max_solve_ms", m.max_solve_ms},
          {"mean_iterations", m.mean_iterations},
          {"max_abs_ltr", m.max_abs_ltr},
          {"violations", m.violations},
          {"first_violation_time", num(m.first_violation_time)},
          {"rolled_over", m.rolled_over},
          {"rollover_time", num(m.rollover_time)},
          {"mean_speed_kmh", m.mean_speed_kmh},
          {"min_speed_kmh", m.min_speed_kmh},
          {"low_speed_dwell", m.low_speed_dwell},
          {"fallbacks", m.fallbacks},
          {"softened", m.softened},
          {"samples", m.samples}};
}

}  // namespace rdeepc::harness

#endif  // RDEEPC_HARNESS_RUN_IO_HPP_
