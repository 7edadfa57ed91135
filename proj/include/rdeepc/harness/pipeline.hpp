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

#ifndef RDEEPC_HARNESS_PIPELINE_HPP_
#define RDEEPC_HARNESS_PIPELINE_HPP_

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdeepc/control/deepc.hpp"
#include "rdeepc/control/identification.hpp"
#include "rdeepc/control/lmpc.hpp"
#include "rdeepc/data/library.hpp"
#include "rdeepc/data/library_io.hpp"
#include "rdeepc/harness/scenario.hpp"
#include "rdeepc/harness/simulation.hpp"

namespace rdeepc::harness {

/// Collected data for a scenario: the nominal log and the optional
/// supplementary one.
struct ScenarioData {
  data::TrajectoryLog nominal;
  std::optional<data::TrajectoryLog> supplement;

  std::vector<data::TrajectoryLog> logs() const {
    std::vector<data::TrajectoryLog> out{nominal};
    if (supplement) out.push_back(*supplement);
    return out;
  }
};

inline ScenarioData collect_scenario_data(const ScenarioConfig& sc) {
  ScenarioData d;
  d.nominal = collect_data(sc, sc.collection);
  if (sc.augmentation) d.supplement = collect_data(sc, *sc.augmentation);
  return d;
}

/// Hankel library over all logs; columns never straddle two logs.
inline data::DataLibrary build_library(const std::vector<data::TrajectoryLog>& logs, int t_ini, int horizon,
                                       std::vector<std::string>* warnings = nullptr, std::uint64_t seed = 0) {
  if (logs.empty()) throw std::invalid_argument("build_library: no logs");
  std::vector<data::DataLibrary> parts;
  for (const auto& log : logs) {
    data::PartitionOptions opt;
    opt.warnings = warnings;
    parts.push_back(data::partition(log, t_ini, horizon, opt));
  }
  data::DataLibrary lib = parts.size() == 1 ? parts.front() : data::concatenate(parts);
  lib.provenance.seed = seed;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& log : logs) {
    for (const Eigen::MatrixXd* M : {&log.u, &log.y}) {
      h = data::fnv1a64({reinterpret_cast<const char*>(M->data()), static_cast<size_t>(M->size()) * sizeof(double)},
                        h);
    }
  }
  lib.provenance.source_hash = data::to_hex(h);
  return lib;
}

/// Logs are joined end to end for identification.
inline data::TrajectoryLog join_logs(const std::vector<data::TrajectoryLog>& logs) {
  data::TrajectoryLog out = logs.front();
  for (size_t i = 1; i < logs.size(); ++i) {
    Eigen::MatrixXd u(out.u.rows(), out.u.cols() + logs[i].u.cols());
    Eigen::MatrixXd y(out.y.rows(), out.y.cols() + logs[i].y.cols());
    u << out.u, logs[i].u;
    y << out.y, logs[i].y;
    out.u = std::move(u);
    out.y = std::move(y);
  }
  return out;
}

inline control::IdentificationResult identify_vehicle(const std::vector<data::TrajectoryLog>& logs, int order) {
  control::IdentificationOptions opt;
  opt.detrend = true;
  return control::identify_state_space(join_logs(logs), order, opt);
}

struct ControllerBundle {
  std::unique_ptr<control::PredictiveController> controller;  // null for the driver model
  std::string label;
};

/// Builds a controller of the given kind from prepared data.
inline ControllerBundle make_controller(ControllerKind kind, const ScenarioConfig& sc,
                                        const control::PredictiveConfig& cfg, const data::DataLibrary* lib,
                                        const control::LinearModel* model) {
  ControllerBundle b;
  b.label = to_string(kind);
  switch (kind) {
    case ControllerKind::kDriver:
      break;
    case ControllerKind::kDeepc:
      if (lib == nullptr) throw std::invalid_argument("deepc needs a data library");
      b.controller = std::make_unique<control::DeepcController>(*lib, cfg, b.label);
      break;
    case ControllerKind::kRdDeepc: {
      if (lib == nullptr) throw std::invalid_argument("rd-deepc needs a data library");
      const data::ReducedLibrary red = data::svd_reduce(*lib, {sc.reduce_q, {}});
      b.controller = std::make_unique<control::DeepcController>(red.blocks, cfg, b.label);
      break;
    }
    case ControllerKind::kLmpc:
      if (model == nullptr) throw std::invalid_argument("lmpc needs an identified model");
      b.controller = std::make_unique<control::LmpcController>(*model, cfg, b.label);
      break;
  }
  return b;
}

/// Everything a comparison needs from one scenario: data, the library and,
/// on first request, the identified model.
class PreparedScenario {
 public:
  explicit PreparedScenario(ScenarioConfig sc) : sc_(std::move(sc)), cfg_(sc_.controller()) {
    data_ = collect_scenario_data(sc_);
    library_ = build_library(data_.logs(), cfg_.t_ini, cfg_.horizon, &warnings_, sc_.collection.seed);
  }

  const ScenarioConfig& scenario() const { return sc_; }
  const control::PredictiveConfig& config() const { return cfg_; }
  const ScenarioData& data() const { return data_; }
  const data::DataLibrary& library() const { return library_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  const control::IdentificationResult& identification() {
    if (!ident_) ident_ = identify_vehicle(data_.logs(), sc_.model_order);
    return *ident_;
  }

  ControllerBundle controller(ControllerKind kind) {
    const control::LinearModel* model = kind == ControllerKind::kLmpc ? &identification().model : nullptr;
    return make_controller(kind, sc_, cfg_, &library_, model);
  }

  RunLog run(ControllerKind kind) {
    ControllerBundle b = controller(kind);
    return run_closed_loop(sc_, b.controller.get(), b.label);
  }

 private:
  ScenarioConfig sc_;
  control::PredictiveConfig cfg_;
  ScenarioData data_;
  data::DataLibrary library_;
  std::vector<std::string> warnings_;
  std::optional<control::IdentificationResult> ident_;
};

/// Replaces the collection seeds, keeping the supplementary log's offset.
inline void override_seed(ScenarioConfig& sc, std::uint64_t seed) {
  if (sc.augmentation) sc.augmentation->seed = seed + (sc.augmentation->seed - sc.collection.seed);
  sc.collection.seed = seed;
}

}  // namespace rdeepc::harness

#endif  // RDEEPC_HARNESS_PIPELINE_HPP_
