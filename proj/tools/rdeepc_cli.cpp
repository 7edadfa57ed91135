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

// Command-line driver for the rollover experiments.

#include <fmt/format.h>
#include <fmt/os.h>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdeepc/data/hankel.hpp"
#include "rdeepc/data/library_io.hpp"
#include "rdeepc/harness/metrics.hpp"
#include "rdeepc/harness/pipeline.hpp"
#include "rdeepc/harness/plots.hpp"
#include "rdeepc/harness/report.hpp"
#include "rdeepc/harness/run_io.hpp"

namespace fs = std::filesystem;
using namespace rdeepc;
using namespace rdeepc::harness;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> reduce;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "scenario file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "override the data collection seed");
  cmd->add_option("-o,--out", c.out, "output directory (default: the scenario's output_dir)");
  cmd->add_option("--reduce", c.reduce, "rank q kept by the reduced library")->check(CLI::PositiveNumber);
}

ScenarioConfig load(const Common& c) {
  ScenarioConfig sc = load_scenario(c.config);
  if (c.seed) override_seed(sc, *c.seed);
  if (c.reduce) sc.reduce_q = *c.reduce;
  if (!c.out.empty()) sc.output_dir = c.out;
  sc.validate();
  return sc;
}

std::vector<ControllerKind> parse_kinds(const std::string& list) {
  std::vector<ControllerKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_controller_kind(item));
  }
  if (out.empty()) throw std::invalid_argument("no controllers given");
  return out;
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w) fmt::print(stderr, "warning: {}\n", s);
}

int cmd_collect(const Common& c) {
  const ScenarioConfig sc = load(c);
  const ScenarioData d = collect_scenario_data(sc);
  const fs::path dir = sc.output_dir / "data";
  const fs::path nominal = dir / (sc.name + "_nominal.csv");
  write_data_log(nominal, d.nominal);
  fmt::print("wrote {} ({} samples)\n", nominal.string(), d.nominal.length());
  if (d.supplement) {
    const fs::path supp = dir / (sc.name + "_supplement.csv");
    write_data_log(supp, *d.supplement);
    fmt::print("wrote {} ({} samples)\n", supp.string(), d.supplement->length());
  }
  const control::PredictiveConfig cfg = sc.controller();
  for (const auto& log : d.logs()) {
    const auto pe = data::check_persistent_excitation(log.u, cfg.t_ini + cfg.horizon + sc.model_order);
    if (!pe.is_pe) {
      fmt::print(stderr, "warning: input is not persistently exciting of order {} (rank {} of {})\n",
                 cfg.t_ini + cfg.horizon + sc.model_order, pe.numerical_rank, pe.required_rank);
    }
  }
  return 0;
}

int cmd_build_lib(const Common& c) {
  const ScenarioConfig sc = load(c);
  const control::PredictiveConfig cfg = sc.controller();
  const ScenarioData d = collect_scenario_data(sc);
  std::vector<std::string> warnings;
  const data::DataLibrary lib = build_library(d.logs(), cfg.t_ini, cfg.horizon, &warnings, sc.collection.seed);
  print_warnings(warnings);
  fs::create_directories(sc.output_dir);
  const fs::path full = sc.output_dir / (sc.name + "_library.rdlib");
  data::save_library(full.string(), lib);
  fmt::print("wrote {} ({} x {})\n", full.string(), lib.rows(), lib.columns());
  if (c.reduce) {
    const data::ReducedLibrary red = data::svd_reduce(lib, {sc.reduce_q, {}});
    const fs::path path = sc.output_dir / fmt::format("{}_library_q{}.rdlib", sc.name, red.columns());
    data::save_library(path.string(), red);
    fmt::print("wrote {} ({} x {}), smallest kept singular value {:.4g}\n", path.string(), red.blocks.rows(),
               red.columns(), red.singular_values[red.columns() - 1]);
  }
  return 0;
}

int cmd_identify(const Common& c) {
  const ScenarioConfig sc = load(c);
  const ScenarioData d = collect_scenario_data(sc);
  const control::IdentificationResult id = identify_vehicle(d.logs(), sc.model_order);
  fmt::print("order {}  held-out NRMS {:.4f}  spectral radius {:.4f}\n", sc.model_order, id.fit_nrms,
             id.spectral_radius);
  auto mat = [](const Eigen::MatrixXd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      nlohmann::json r = nlohmann::json::array();
      for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
      rows.push_back(r);
    }
    return rows;
  };
  const control::LinearModel& m = id.model;
  const nlohmann::json j = {{"order", m.order()},     {"A", mat(m.A)},   {"B", mat(m.B)},
                            {"C", mat(m.C)},          {"D", mat(m.D)},   {"u0", mat(m.u0)},
                            {"y0", mat(m.y0)},        {"fit_nrms", id.fit_nrms},
                            {"spectral_radius", id.spectral_radius}};
  fs::create_directories(sc.output_dir);
  const fs::path path = sc.output_dir / (sc.name + "_model.json");
  std::ofstream(path) << j.dump(2) << "\n";
  fmt::print("wrote {}\n", path.string());
  return 0;
}

ReportRow run_and_persist(PreparedScenario& prep, ControllerKind kind, std::vector<RunLog>* keep) {
  RunLog log = prep.run(kind);
  print_warnings(log.warnings);
  const ScenarioConfig& sc = prep.scenario();
  write_run(sc.output_dir, log);
  const RunMetrics m = compute_metrics(log, prep.config());
  std::ofstream(sc.output_dir / (run_stem(log) + "_metrics.json")) << to_json(m).dump(2) << "\n";
  if (keep) keep->push_back(std::move(log));
  return {sc.name, to_string(kind), m};
}

int cmd_run(const Common& c, const std::string& controller) {
  const ScenarioConfig sc = load(c);
  PreparedScenario prep(sc);
  print_warnings(prep.warnings());
  std::vector<RunLog> logs;
  const ReportRow row = run_and_persist(prep, parse_controller_kind(controller), &logs);
  emit_plots(sc.output_dir, run_stem(logs.front()), logs, prep.config().input_box);
  fmt::print("{}", render_table({row}));
  return exit_status(row.metrics);
}

int cmd_compare(const Common& c, const std::string& controllers) {
  const ScenarioConfig sc = load(c);
  PreparedScenario prep(sc);
  print_warnings(prep.warnings());
  std::vector<ReportRow> rows;
  std::vector<RunLog> logs;
  for (ControllerKind k : parse_kinds(controllers)) {
    rows.push_back(run_and_persist(prep, k, &logs));
    fmt::print(stderr, "{}: done\n", rows.back().controller);
  }
  const fs::path csv = sc.output_dir / (sc.name + "_compare.csv");
  write_report_csv(csv, rows);
  emit_plots(sc.output_dir, sc.name, logs, prep.config().input_box);
  fmt::print("{}", render_table(rows));
  fmt::print("wrote {}\n", csv.string());
  return 0;
}

int cmd_plot(const Common& c, const std::string& controllers) {
  const ScenarioConfig sc = load(c);
  const control::PredictiveConfig cfg = sc.controller();
  std::vector<RunLog> logs;
  std::vector<ReportRow> rows;
  for (ControllerKind k : parse_kinds(controllers)) {
    logs.push_back(read_run(sc.output_dir, sc.name, to_string(k)));
    rows.push_back({sc.name, to_string(k), compute_metrics(logs.back(), cfg)});
  }
  for (const fs::path& p : emit_plots(sc.output_dir, sc.name, logs, cfg.input_box)) {
    fmt::print("wrote {}\n", p.string());
  }
  // Timing columns are empty here: diagnostics are not re-read.
  fmt::print("{}", render_table(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rollover prevention experiments: data collection, libraries and closed-loop runs"};
  app.require_subcommand(1);

  Common collect_opts, lib_opts, ident_opts, run_opts, cmp_opts, plot_opts;
  std::string run_controller = "rd-deepc";
  std::string cmp_controllers = "driver,lmpc,rd-deepc";
  std::string plot_controllers = "driver,lmpc,rd-deepc";

  auto* collect = app.add_subcommand("collect", "record an excited driver-model log");
  add_common(collect, collect_opts);
  auto* build = app.add_subcommand("build-lib", "build the Hankel library (and its reduction with --reduce)");
  add_common(build, lib_opts);
  auto* ident = app.add_subcommand("identify", "identify the linear model used by LMPC");
  add_common(ident, ident_opts);
  auto* run = app.add_subcommand("run", "closed-loop run of one controller");
  add_common(run, run_opts);
  run->add_option("--controller", run_controller, "driver, lmpc, deepc or rd-deepc");
  auto* cmp = app.add_subcommand("compare", "run several controllers and tabulate the metrics");
  add_common(cmp, cmp_opts);
  cmp->add_option("--controllers", cmp_controllers, "comma-separated list");
  auto* plot = app.add_subcommand("plot", "redraw the SVG figures from persisted runs");
  add_common(plot, plot_opts);
  plot->add_option("--controllers", plot_controllers, "comma-separated list");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*collect) return cmd_collect(collect_opts);
    if (*build) return cmd_build_lib(lib_opts);
    if (*ident) return cmd_identify(ident_opts);
    if (*run) return cmd_run(run_opts, run_controller);
    if (*cmp) return cmd_compare(cmp_opts, cmp_controllers);
    if (*plot) return cmd_plot(plot_opts, plot_controllers);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
