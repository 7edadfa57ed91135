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

#ifndef RDEEPC_PLANT_TERRAIN_HPP_
#define RDEEPC_PLANT_TERRAIN_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "rdeepc/util/config.hpp"

namespace rdeepc::plant {

/// Road surface at one arclength; derivatives are with respect to arclength.
struct TerrainSample {
  double elevation = 0.0;
  double slope = 0.0;       // dz/ds
  double elevation_dd = 0.0;  // d2z/ds2
  double bank = 0.0;        // rad, positive raises the right edge
  double bank_d = 0.0;
  double bank_dd = 0.0;
  double mu = 0.85;
};

/// Band-limited random sum of sinusoids, faded in and out with C2 ramps.
class RandomProfile {
 public:
  RandomProfile() = default;

  RandomProfile(double rms, double min_wavelength, double max_wavelength, int components,
                std::uint64_t seed, double start, double end, double ramp)
      : start_(start), end_(end), ramp_(ramp) {
    if (rms < 0.0 || min_wavelength <= 0.0 || max_wavelength < min_wavelength || components < 1 ||
        end < start || ramp <= 0.0 || 2.0 * ramp > end - start) {
      throw std::invalid_argument("RandomProfile: invalid parameters");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double amp = rms * std::sqrt(2.0 / components);
    for (int k = 0; k < components; ++k) {
      const double wl = min_wavelength * std::pow(max_wavelength / min_wavelength, unit(rng));
      waves_.push_back({amp, 2.0 * std::numbers::pi / wl, 2.0 * std::numbers::pi * unit(rng)});
    }
  }

  /// Value and first two derivatives at s.
  void eval(double s, double& f, double& df, double& ddf) const {
    f = df = ddf = 0.0;
    if (waves_.empty() || s <= start_ || s >= end_) return;
    double w, dw, ddw;
    window(s, w, dw, ddw);
    double g = 0.0, dg = 0.0, ddg = 0.0;
    for (const auto& wave : waves_) {
      const double arg = wave.k * s + wave.phase;
      g += wave.a * std::sin(arg);
      dg += wave.a * wave.k * std::cos(arg);
      ddg -= wave.a * wave.k * wave.k * std::sin(arg);
    }
    f = w * g;
    df = dw * g + w * dg;
    ddf = ddw * g + 2.0 * dw * dg + w * ddg;
  }

 private:
  struct Wave {
    double a, k, phase;
  };

  // Quintic smoothstep ramps keep the profile C2 at the section ends.
  void window(double s, double& w, double& dw, double& ddw) const {
    double t, sign;
    if (s < start_ + ramp_) {
      t = (s - start_) / ramp_;
      sign = 1.0;
    } else if (s > end_ - ramp_) {
      t = (end_ - s) / ramp_;
      sign = -1.0;
    } else {
      w = 1.0, dw = 0.0, ddw = 0.0;
      return;
    }
    w = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    dw = sign * 30.0 * t * t * (1.0 - t) * (1.0 - t) / ramp_;
    ddw = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (ramp_ * ramp_);
  }

  std::vector<Wave> waves_;
  double start_ = 0.0;
  double end_ = 0.0;
  double ramp_ = 1.0;
};

class TerrainProfile {
 public:
  /// Flat road with friction mu.
  explicit TerrainProfile(double mu = 0.85) : mu_(mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("TerrainProfile: mu must be positive");
  }

  TerrainProfile(double mu, RandomProfile elevation, RandomProfile bank)
      : TerrainProfile(mu) {
    elevation_ = std::move(elevation);
    bank_ = std::move(bank);
  }

  TerrainSample at(double s) const {
    TerrainSample t;
    elevation_.eval(s, t.elevation, t.slope, t.elevation_dd);
    bank_.eval(s, t.bank, t.bank_d, t.bank_dd);
    t.mu = mu_;
    return t;
  }

  double mu() const { return mu_; }

 private:
  double mu_;
  RandomProfile elevation_;
  RandomProfile bank_;
};

/// Reads `terrain = flat | riverbed` and the riverbed_* keys.
inline TerrainProfile terrain_from(const util::Config& c) {
  const double mu = c.get_double("mu", 0.85);
  const std::string kind = c.get_string("terrain", "flat");
  if (kind == "flat") return TerrainProfile(mu);
  if (kind != "riverbed") throw std::runtime_error("unknown terrain '" + kind + "'");
  const auto seed = static_cast<std::uint64_t>(c.get_int("riverbed_seed", 7));
  const double start = c.get_double("riverbed_start", 0.0);
  const double end = c.get_double("riverbed_end", 2000.0);
  const double ramp = c.get_double("riverbed_ramp", 20.0);
  const int n = c.get_int("riverbed_components", 12);
  RandomProfile elevation(c.get_double("riverbed_elevation_rms", 0.05),
                          c.get_double("riverbed_min_wavelength", 15.0),
                          c.get_double("riverbed_max_wavelength", 80.0), n, seed, start, end, ramp);
  RandomProfile bank(c.get_double("riverbed_bank_rms_deg", 3.0) * std::numbers::pi / 180.0,
                     c.get_double("riverbed_min_wavelength", 15.0),
                     c.get_double("riverbed_max_wavelength", 80.0), n, seed + 1, start, end, ramp);
  return TerrainProfile(mu, std::move(elevation), std::move(bank));
}

}  // namespace rdeepc::plant

#endif  // RDEEPC_PLANT_TERRAIN_HPP_
