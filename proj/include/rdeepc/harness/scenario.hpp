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

#ifndef RDEEPC_HARNESS_SCENARIO_HPP_
#define RDEEPC_HARNESS_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdeepc/control/controller.hpp"
#include "rdeepc/plant/driver.hpp"
#include "rdeepc/plant/params.hpp"
#include "rdeepc/plant/terrain.hpp"
#include "rdeepc/plant/track.hpp"
#include "rdeepc/util/config.hpp"

namespace rdeepc::harness {

namespace fs = std::filesystem;

enum class ControllerKind { kDriver, kLmpc, kDeepc, kRdDeepc };

inline const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::kDriver: return "driver";
    case ControllerKind::kLmpc: return "lmpc";
    case ControllerKind::kDeepc: return "deepc";
    case ControllerKind::kRdDeepc: return "rd-deepc";
  }
  return "unknown";
}

inline ControllerKind parse_controller_kind(const std::string& s) {
  if (s == "driver" || s == "sdm") return ControllerKind::kDriver;
  if (s == "lmpc") return ControllerKind::kLmpc;
  if (s == "deepc") return ControllerKind::kDeepc;
  if (s == "rd-deepc" || s == "rddeepc") return ControllerKind::kRdDeepc;
  throw std::invalid_argument("unknown controller '" + s + "' (driver, lmpc, deepc, rd-deepc)");
}

/// Vehicle parameters plus its driver and speed-governor tuning.
struct VehicleSetup {
  plant::VehicleParams params;
  plant::TireParams tires;
  plant::DriverGains driver;
  plant::GovernorGains governor;
};

inline VehicleSetup vehicle_setup_from(const util::Config& c) {
  return {plant::vehicle_params_from(c), plant::tire_params_from(c), plant::driver_gains_from(c),
          plant::governor_gains_from(c)};
}

/// Settings for the excited driver-model run that produces a data log.
struct CollectionSetup {
  fs::path track_file;
  fs::path terrain_file;  // empty means flat road with the run's friction
  double speed_kmh = 100.0;
  int samples = 3200;
  std::vector<double> excitation_std{5.0, 3.0};  // steering deg, speed km/h
  std::uint64_t seed = 1;
};

struct ScenarioConfig {
  std::string name;
  fs::path source;
  fs::path vehicle_file;
  fs::path track_file;
  fs::path terrain_file;  // empty: flat
  fs::path controller_file;
  double v_ref_kmh = 105.0;
  double initial_speed_kmh = 105.0;
  double duration_s = 35.0;
  double sample_time = 0.01;
  int substeps = 10;
  fs::path output_dir;
  CollectionSetup collection;
  std::optional<CollectionSetup> augmentation;  // second log joined to the library
  int model_order = 4;
  int reduce_q = 600;

  void validate() const {
    for (const fs::path* p : {&vehicle_file, &track_file, &controller_file}) {
      if (!fs::exists(*p)) throw std::runtime_error("scenario " + name + ": missing file " + p->string());
    }
    if (!terrain_file.empty() && !fs::exists(terrain_file)) {
      throw std::runtime_error("scenario " + name + ": missing file " + terrain_file.string());
    }
    if (!(duration_s > 0.0)) throw std::runtime_error("scenario " + name + ": duration must be positive");
    if (!(sample_time > 0.0) || substeps <= 0) throw std::runtime_error("scenario " + name + ": bad timing");
    if (collection.samples <= 0) throw std::runtime_error("scenario " + name + ": collection samples <= 0");
  }

  VehicleSetup vehicle() const { return vehicle_setup_from(util::Config::load(vehicle_file)); }
  plant::TrackGeometry track() const { return plant::track_from(util::Config::load(track_file)); }
  plant::TerrainProfile terrain() const {
    if (terrain_file.empty()) return plant::TerrainProfile(vehicle().tires.mu_nominal);
    return plant::terrain_from(util::Config::load(terrain_file));
  }
  control::PredictiveConfig controller() const {
    return control::predictive_config_from(util::Config::load(controller_file));
  }
};

namespace detail {
inline fs::path optional_path(const util::Config& c, const std::string& key) {
  return c.has(key) ? c.resolve(c.get_string(key)) : fs::path{};
}

inline CollectionSetup collection_from(const util::Config& c, const std::string& prefix, CollectionSetup d) {
  if (c.has(prefix + "track")) d.track_file = c.resolve(c.get_string(prefix + "track"));
  if (c.has(prefix + "terrain")) d.terrain_file = c.resolve(c.get_string(prefix + "terrain"));
  d.speed_kmh = c.get_double(prefix + "speed_kmh", d.speed_kmh);
  d.samples = c.get_int(prefix + "samples", d.samples);
  if (c.has(prefix + "excitation_std")) d.excitation_std = c.get_list(prefix + "excitation_std");
  d.seed = static_cast<std::uint64_t>(c.get_int(prefix + "seed", static_cast<int>(d.seed)));
  return d;
}
}  // namespace detail

inline ScenarioConfig load_scenario(const fs::path& path) {
  const util::Config c = util::Config::load(path);
  ScenarioConfig s;
  s.source = path;
  s.name = c.get_string("name", path.stem().string());
  s.vehicle_file = c.resolve(c.get_string("vehicle"));
  s.track_file = c.resolve(c.get_string("track"));
  s.terrain_file = detail::optional_path(c, "terrain");
  s.controller_file = c.resolve(c.get_string("controller"));
  s.v_ref_kmh = c.get_double("v_ref_kmh", s.v_ref_kmh);
  s.initial_speed_kmh = c.get_double("initial_speed_kmh", s.v_ref_kmh);
  s.duration_s = c.get_double("duration_s", s.duration_s);
  s.sample_time = c.get_double("sample_time", s.sample_time);
  s.substeps = c.get_int("substeps", s.substeps);
  s.output_dir = c.has("output_dir") ? c.resolve(c.get_string("output_dir")) : fs::path("out") / s.name;
  CollectionSetup base;
  base.track_file = s.track_file;
  s.collection = detail::collection_from(c, "collect_", base);
  if (c.has("augment_samples")) {
    CollectionSetup aug = s.collection;
    aug.samples = 0;
    s.augmentation = detail::collection_from(c, "augment_", aug);
  }
  s.model_order = c.get_int("model_order", s.model_order);
  s.reduce_q = c.get_int("reduce_q", s.reduce_q);
  s.validate();
  return s;
}

}  // namespace rdeepc::harness

#endif  // RDEEPC_HARNESS_SCENARIO_HPP_
