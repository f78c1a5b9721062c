// Copyright 2026 The rownoise Authors. All Rights Reserved.
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

// Simulation scenario types and their flat JSON schema.
//
// JSON keys equal the C++ field names. Missing keys keep their defaults;
// unknown keys are rejected so that typos in config files fail loudly.

#ifndef ROWNOISE_CONFIG_HPP_
#define ROWNOISE_CONFIG_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "rownoise/counter_rng.hpp"
#include "rownoise/errors.hpp"
#include "rownoise/physics.hpp"

namespace rownoise {

using nlohmann::json;

struct SensorConfig {
  int width = 1280;
  int active_rows = 800;
  int optical_black_rows = 0;
  int blanking_rows = 12;
  double fps = 30.0;
  int bit_depth = 8;
  double pedestal_dn = 16.0;
  double dn_per_volt = 255.0 / 3.3;
  int channels = 1;
  // Light-shielded reference pixels appended to every row; 0 disables them.
  int dark_columns = 0;

  int output_rows() const { return optical_black_rows + active_rows; }
  int frame_length_rows() const { return active_rows + optical_black_rows + blanking_rows; }
  double line_frequency() const { return physics::line_frequency(fps, frame_length_rows()); }
  int max_code() const { return (1 << bit_depth) - 1; }

  void validate() const {
    if (width < 1) throw ConfigError("sensor.width must be >= 1");
    if (active_rows < 1) throw ConfigError("sensor.active_rows must be >= 1");
    if (optical_black_rows < 0) throw ConfigError("sensor.optical_black_rows must be >= 0");
    if (blanking_rows < 0) throw ConfigError("sensor.blanking_rows must be >= 0");
    if (!(fps > 0.0) || !std::isfinite(fps)) throw ConfigError("sensor.fps must be > 0");
    if (bit_depth != 8) throw ConfigError("sensor.bit_depth must be 8");
    if (!(pedestal_dn >= 0.0) || pedestal_dn >= (1 << bit_depth)) {
      throw ConfigError("sensor.pedestal_dn must lie in [0, 2^bit_depth)");
    }
    if (!(dn_per_volt > 0.0)) throw ConfigError("sensor.dn_per_volt must be > 0");
    if (channels != 1 && channels != 3) throw ConfigError("sensor.channels must be 1 or 3");
    if (dark_columns < 0) throw ConfigError("sensor.dark_columns must be >= 0");
  }

  friend bool operator==(const SensorConfig&, const SensorConfig&) = default;
};

enum class PhaseMode { kContinuous, kRandomPerFrame };

struct SupplyNoiseConfig {
  double frequency_hz = 0.0;
  double amplitude_vpp = 0.0;
  double phase_rad = 0.0;
  // Photodiode bias shift per volt of supply noise.
  double coupling_gain = 1.0;
  PhaseMode phase_mode = PhaseMode::kContinuous;
  // First-order RC supply filter corner; absent means unfiltered.
  std::optional<double> rc_cutoff_hz;

  double rc_gain() const {
    if (!rc_cutoff_hz) return 1.0;
    const double ratio = frequency_hz / *rc_cutoff_hz;
    return 1.0 / std::sqrt(1.0 + ratio * ratio);
  }
  double rc_phase_rad() const { return rc_cutoff_hz ? -std::atan(frequency_hz / *rc_cutoff_hz) : 0.0; }
  double effective_amplitude_vpp() const { return amplitude_vpp * rc_gain(); }

  void validate() const {
    if (!(frequency_hz >= 0.0) || !std::isfinite(frequency_hz)) {
      throw ConfigError("supply.frequency_hz must be >= 0");
    }
    if (!(amplitude_vpp >= 0.0)) throw ConfigError("supply.amplitude_vpp must be >= 0");
    if (!std::isfinite(phase_rad)) throw ConfigError("supply.phase_rad must be finite");
    if (!std::isfinite(coupling_gain)) throw ConfigError("supply.coupling_gain must be finite");
    if (rc_cutoff_hz && !(*rc_cutoff_hz > 0.0)) throw ConfigError("supply.rc_cutoff_hz must be > 0");
  }

  friend bool operator==(const SupplyNoiseConfig&, const SupplyNoiseConfig&) = default;
};

struct TemporalNoiseConfig {
  // Dark-current electrons per pixel; Poisson-distributed when shot_enabled,
  // otherwise added as its exact mean.
  bool shot_enabled = true;
  double dark_signal_e = 20.0;
  double dn_per_electron = 0.1;
  // Gaussian thermal/read noise.
  double read_noise_dn = 0.5;
  bool flicker_enabled = false;
  double flicker_scale_dn = 0.3;
  // kTC noise from sqrt(kT/C), removed entirely by CDS.
  bool reset_enabled = true;
  double reset_temp_k = 300.0;
  double reset_cap_f = 5e-15;
  bool cds_enabled = true;

  static TemporalNoiseConfig none() {
    TemporalNoiseConfig t;
    t.shot_enabled = false;
    t.dark_signal_e = 0.0;
    t.read_noise_dn = 0.0;
    t.flicker_enabled = false;
    t.flicker_scale_dn = 0.0;
    t.reset_enabled = false;
    return t;
  }

  double reset_sigma_dn(double dn_per_volt) const {
    if (!reset_enabled || cds_enabled) return 0.0;
    return physics::reset_noise_v(reset_temp_k, reset_cap_f) * dn_per_volt;
  }

  void validate() const {
    if (!(dark_signal_e >= 0.0)) throw ConfigError("temporal.dark_signal_e must be >= 0");
    if (!(dn_per_electron >= 0.0)) throw ConfigError("temporal.dn_per_electron must be >= 0");
    if (!(read_noise_dn >= 0.0)) throw ConfigError("temporal.read_noise_dn must be >= 0");
    if (!(flicker_scale_dn >= 0.0)) throw ConfigError("temporal.flicker_scale_dn must be >= 0");
    if (reset_enabled && !(reset_temp_k > 0.0 && reset_cap_f > 0.0)) {
      throw ConfigError("temporal.reset_temp_k and reset_cap_f must be > 0");
    }
  }

  friend bool operator==(const TemporalNoiseConfig&, const TemporalNoiseConfig&) = default;
};

struct SpatialNoiseConfig {
  double dsnu_dn = 0.5;
  double column_fpn_dn = 0.25;
  double prnu_fraction = 0.01;

  static SpatialNoiseConfig none() { return {0.0, 0.0, 0.0}; }

  void validate() const {
    if (!(dsnu_dn >= 0.0)) throw ConfigError("spatial.dsnu_dn must be >= 0");
    if (!(column_fpn_dn >= 0.0)) throw ConfigError("spatial.column_fpn_dn must be >= 0");
    if (!(prnu_fraction >= 0.0)) throw ConfigError("spatial.prnu_fraction must be >= 0");
  }

  friend bool operator==(const SpatialNoiseConfig&, const SpatialNoiseConfig&) = default;
};

// Everything needed to regenerate a capture bit-exactly. Illumination is
// always 0 lux. `seed` fixes the sensor's fixed-pattern maps; `stream`
// selects an independent temporal-noise realization for the same sensor.
struct SimScenario {
  SensorConfig sensor;
  SupplyNoiseConfig supply;
  TemporalNoiseConfig temporal;
  SpatialNoiseConfig spatial;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;

  void validate() const {
    sensor.validate();
    supply.validate();
    temporal.validate();
    spatial.validate();
  }

  friend bool operator==(const SimScenario&, const SimScenario&) = default;
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

// Reads known keys from an object and rejects the rest.
class StrictObject {
 public:
  StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
      return;
    }
    T v{};
    get(key, v);
    out = v;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline const char* to_string(PhaseMode m) {
  return m == PhaseMode::kContinuous ? "continuous" : "random_per_frame";
}

inline PhaseMode phase_mode_from_string(const std::string& s) {
  if (s == "continuous") return PhaseMode::kContinuous;
  if (s == "random_per_frame") return PhaseMode::kRandomPerFrame;
  throw ConfigError("unknown phase_mode '" + s + "' (continuous|random_per_frame)");
}

inline void to_json(json& j, const SensorConfig& s) {
  j = json{{"width", s.width},
           {"active_rows", s.active_rows},
           {"optical_black_rows", s.optical_black_rows},
           {"blanking_rows", s.blanking_rows},
           {"fps", s.fps},
           {"bit_depth", s.bit_depth},
           {"pedestal_dn", s.pedestal_dn},
           {"dn_per_volt", s.dn_per_volt},
           {"channels", s.channels},
           {"dark_columns", s.dark_columns}};
}

inline void from_json(const json& j, SensorConfig& s) {
  detail::StrictObject o(j, "sensor");
  o.get("width", s.width);
  o.get("active_rows", s.active_rows);
  o.get("optical_black_rows", s.optical_black_rows);
  o.get("blanking_rows", s.blanking_rows);
  o.get("fps", s.fps);
  o.get("bit_depth", s.bit_depth);
  o.get("pedestal_dn", s.pedestal_dn);
  o.get("dn_per_volt", s.dn_per_volt);
  o.get("channels", s.channels);
  o.get("dark_columns", s.dark_columns);
  o.finish();
}

inline void to_json(json& j, const SupplyNoiseConfig& s) {
  j = json{{"frequency_hz", s.frequency_hz},
           {"amplitude_vpp", s.amplitude_vpp},
           {"phase_rad", s.phase_rad},
           {"coupling_gain", s.coupling_gain},
           {"phase_mode", to_string(s.phase_mode)},
           {"rc_cutoff_hz", s.rc_cutoff_hz ? json(*s.rc_cutoff_hz) : json(nullptr)}};
}

inline void from_json(const json& j, SupplyNoiseConfig& s) {
  detail::StrictObject o(j, "supply");
  o.get("frequency_hz", s.frequency_hz);
  o.get("amplitude_vpp", s.amplitude_vpp);
  o.get("phase_rad", s.phase_rad);
  o.get("coupling_gain", s.coupling_gain);
  std::string mode = to_string(s.phase_mode);
  o.get("phase_mode", mode);
  s.phase_mode = phase_mode_from_string(mode);
  o.get_optional("rc_cutoff_hz", s.rc_cutoff_hz);
  o.finish();
}

inline void to_json(json& j, const TemporalNoiseConfig& t) {
  j = json{{"shot_enabled", t.shot_enabled},
           {"dark_signal_e", t.dark_signal_e},
           {"dn_per_electron", t.dn_per_electron},
           {"read_noise_dn", t.read_noise_dn},
           {"flicker_enabled", t.flicker_enabled},
           {"flicker_scale_dn", t.flicker_scale_dn},
           {"reset_enabled", t.reset_enabled},
           {"reset_temp_k", t.reset_temp_k},
           {"reset_cap_f", t.reset_cap_f},
           {"cds_enabled", t.cds_enabled}};
}

inline void from_json(const json& j, TemporalNoiseConfig& t) {
  detail::StrictObject o(j, "temporal");
  o.get("shot_enabled", t.shot_enabled);
  o.get("dark_signal_e", t.dark_signal_e);
  o.get("dn_per_electron", t.dn_per_electron);
  o.get("read_noise_dn", t.read_noise_dn);
  o.get("flicker_enabled", t.flicker_enabled);
  o.get("flicker_scale_dn", t.flicker_scale_dn);
  o.get("reset_enabled", t.reset_enabled);
  o.get("reset_temp_k", t.reset_temp_k);
  o.get("reset_cap_f", t.reset_cap_f);
  o.get("cds_enabled", t.cds_enabled);
  o.finish();
}

inline void to_json(json& j, const SpatialNoiseConfig& s) {
  j = json{{"dsnu_dn", s.dsnu_dn},
           {"column_fpn_dn", s.column_fpn_dn},
           {"prnu_fraction", s.prnu_fraction}};
}

inline void from_json(const json& j, SpatialNoiseConfig& s) {
  detail::StrictObject o(j, "spatial");
  o.get("dsnu_dn", s.dsnu_dn);
  o.get("column_fpn_dn", s.column_fpn_dn);
  o.get("prnu_fraction", s.prnu_fraction);
  o.finish();
}

inline void to_json(json& j, const SimScenario& s) {
  j = json{{"sensor", s.sensor},     {"supply", s.supply}, {"temporal", s.temporal},
           {"spatial", s.spatial},   {"seed", s.seed},     {"stream", s.stream},
           {"illumination_lux", 0}};
}

inline void from_json(const json& j, SimScenario& s) {
  detail::StrictObject o(j, "scenario");
  if (const json* c = o.child("sensor")) from_json(*c, s.sensor);
  if (const json* c = o.child("supply")) from_json(*c, s.supply);
  if (const json* c = o.child("temporal")) from_json(*c, s.temporal);
  if (const json* c = o.child("spatial")) from_json(*c, s.spatial);
  o.get("seed", s.seed);
  o.get("stream", s.stream);
  double lux = 0.0;
  o.get("illumination_lux", lux);
  if (lux != 0.0) throw ConfigError("scenario.illumination_lux: only 0 lux is supported");
  o.finish();
}

// Content hash of the canonical serialization.
inline std::uint64_t scenario_hash(const SimScenario& s) { return fnv1a64(json(s).dump()); }

}  // namespace rownoise

#endif  // ROWNOISE_CONFIG_HPP_
