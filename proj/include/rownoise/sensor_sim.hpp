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

// Column-parallel readout simulator for a covered (0 lux) sensor.
//
// Rows are read out one after another at the line frequency. All pixels of a
// row are sampled at the same instant, so the supply-noise voltage at that
// instant shifts the photodiode bias of the whole row by the same amount.
// Readout order is optical black rows, then active rows, then blanking rows
// (which produce no output). Row r of frame n is sampled at
//
//   t = (n * frame_length_rows + r) / line_frequency
//
// in continuous-phase mode, or at r / line_frequency plus a random per-frame
// phase otherwise.

#ifndef ROWNOISE_SENSOR_SIM_HPP_
#define ROWNOISE_SENSOR_SIM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "rownoise/config.hpp"
#include "rownoise/counter_rng.hpp"
#include "rownoise/errors.hpp"
#include "rownoise/flicker.hpp"
#include "rownoise/frame.hpp"

namespace rownoise {

// Frozen fixed-pattern maps for one sensor. Indexed [channel][row][col] for
// the per-pixel maps and [channel][col] for the column map.
struct FpnMaps {
  int width = 0;
  int rows = 0;
  int channels = 0;
  std::vector<double> pixel_offset;
  std::vector<double> column_offset;
  std::vector<double> prnu_gain;

  double pixel(int c, int r, int x) const {
    return pixel_offset[(static_cast<std::size_t>(c) * rows + r) * width + x];
  }
  double column(int c, int x) const { return column_offset[static_cast<std::size_t>(c) * width + x]; }
  double gain(int c, int r, int x) const {
    return prnu_gain[(static_cast<std::size_t>(c) * rows + r) * width + x];
  }

  friend bool operator==(const FpnMaps&, const FpnMaps&) = default;
};

inline FpnMaps generate_fpn_maps(std::uint64_t seed, const SensorConfig& sensor,
                                 const SpatialNoiseConfig& spatial) {
  FpnMaps m;
  m.width = sensor.width;
  m.rows = sensor.output_rows();
  m.channels = sensor.channels;
  const std::size_t n = static_cast<std::size_t>(m.width) * m.rows * m.channels;
  m.pixel_offset.assign(n, 0.0);
  m.prnu_gain.assign(n, 1.0);
  m.column_offset.assign(static_cast<std::size_t>(m.width) * m.channels, 0.0);

  for (int c = 0; c < m.channels; ++c) {
    const auto uc = static_cast<std::uint64_t>(c);
    if (spatial.column_fpn_dn > 0.0) {
      for (int x = 0; x < m.width; ++x) {
        CounterRng rng(hash_key({seed, static_cast<std::uint64_t>(StreamTag::kColumnOffset), uc,
                                 static_cast<std::uint64_t>(x)}));
        m.column_offset[static_cast<std::size_t>(c) * m.width + x] =
            spatial.column_fpn_dn * rng.gaussian();
      }
    }
    if (spatial.dsnu_dn <= 0.0 && spatial.prnu_fraction <= 0.0) continue;
    for (int r = 0; r < m.rows; ++r) {
      const std::uint64_t row_key = hash_key({seed, uc, static_cast<std::uint64_t>(r)});
      for (int x = 0; x < m.width; ++x) {
        const std::size_t i = (static_cast<std::size_t>(c) * m.rows + r) * m.width + x;
        const std::uint64_t pix_key = hash_key({row_key, static_cast<std::uint64_t>(x)});
        if (spatial.dsnu_dn > 0.0) {
          CounterRng rng(mix64(pix_key ^ static_cast<std::uint64_t>(StreamTag::kPixelOffset)));
          m.pixel_offset[i] = spatial.dsnu_dn * rng.gaussian();
        }
        if (spatial.prnu_fraction > 0.0) {
          CounterRng rng(mix64(pix_key ^ static_cast<std::uint64_t>(StreamTag::kPrnu)));
          m.prnu_gain[i] = 1.0 + spatial.prnu_fraction * rng.gaussian();
        }
      }
    }
  }
  return m;
}

// Supply-noise voltage at time t after the optional RC filter:
// (Vpp_eff / 2) * sin(2*pi*f*t + phase + rc_phase).
inline double supply_noise_sample(const SupplyNoiseConfig& supply, double t) {
  return 0.5 * supply.effective_amplitude_vpp() *
         std::sin(2.0 * std::numbers::pi * supply.frequency_hz * t + supply.phase_rad +
                  supply.rc_phase_rad());
}

// Round half away from zero, then clamp to the code range.
inline std::uint8_t quantize(double value, int max_code = 255) {
  const double q = std::round(value);
  return static_cast<std::uint8_t>(std::clamp(q, 0.0, static_cast<double>(max_code)));
}

// Supply-induced bias offset of every output row of a frame, in DN.
inline std::vector<double> row_offsets_dn(const SimScenario& s, int frame_index) {
  const SensorConfig& sensor = s.sensor;
  const SupplyNoiseConfig& supply = s.supply;
  std::vector<double> out(static_cast<std::size_t>(sensor.output_rows()), 0.0);
  const double amplitude_dn =
      0.5 * supply.coupling_gain * supply.effective_amplitude_vpp() * sensor.dn_per_volt;
  if (amplitude_dn == 0.0) return out;

  // Phase is reduced in cycles (f / f_line per row time) before the sin() so
  // that an exact harmonic lands on exactly the same sample every row.
  const double cycles_per_row = supply.frequency_hz / sensor.line_frequency();
  double base = supply.phase_rad + supply.rc_phase_rad();
  std::uint64_t first_row = 0;
  if (supply.phase_mode == PhaseMode::kContinuous) {
    first_row = static_cast<std::uint64_t>(frame_index) *
                static_cast<std::uint64_t>(sensor.frame_length_rows());
  } else {
    CounterRng rng(hash_key({s.seed, s.stream, static_cast<std::uint64_t>(StreamTag::kPhase),
                             static_cast<std::uint64_t>(frame_index)}));
    base += 2.0 * std::numbers::pi * rng.uniform();
  }
  for (std::size_t r = 0; r < out.size(); ++r) {
    const double cycles = cycles_per_row * static_cast<double>(first_row + r);
    const double frac = cycles - std::floor(cycles);
    out[r] = amplitude_dn * std::sin(2.0 * std::numbers::pi * frac + base);
  }
  return out;
}

namespace detail {

inline double temporal_terms(const TemporalNoiseConfig& t, double reset_sigma_dn,
                             std::uint64_t pixel_key) {
  double v = 0.0;
  if (t.read_noise_dn > 0.0) {
    CounterRng rng(mix64(pixel_key ^ static_cast<std::uint64_t>(StreamTag::kRead)));
    v += t.read_noise_dn * rng.gaussian();
  }
  if (reset_sigma_dn > 0.0) {
    CounterRng rng(mix64(pixel_key ^ static_cast<std::uint64_t>(StreamTag::kReset)));
    v += reset_sigma_dn * rng.gaussian();
  }
  return v;
}

}  // namespace detail

// Simulates one frame using precomputed fixed-pattern maps.
inline Frame simulate_frame(const SimScenario& s, int frame_index, const FpnMaps& maps) {
  s.validate();
  if (frame_index < 0) throw DomainError("simulate_frame: frame index must be >= 0");
  const SensorConfig& sensor = s.sensor;
  const TemporalNoiseConfig& t = s.temporal;
  const int rows = sensor.output_rows();
  const int max_code = sensor.max_code();
  const double reset_sigma = t.reset_sigma_dn(sensor.dn_per_volt);
  const bool flicker = t.flicker_enabled && t.flicker_scale_dn > 0.0;
  const bool per_pixel_random = t.shot_enabled || t.read_noise_dn > 0.0 || reset_sigma > 0.0;
  const double mean_signal_e = t.dark_signal_e;
  const std::uint64_t sample_base = static_cast<std::uint64_t>(frame_index) *
                                    static_cast<std::uint64_t>(sensor.frame_length_rows());

  Frame frame;
  frame.index = frame_index;
  frame.metadata = {scenario_hash(s), s.seed};
  frame.pixels = PixelGrid(sensor.width, rows, sensor.channels);
  if (sensor.dark_columns > 0) {
    frame.dark_reference = PixelGrid(sensor.dark_columns, rows, sensor.channels);
  }

  const std::vector<double> offsets = row_offsets_dn(s, frame_index);
  const int total_cols = sensor.width + sensor.dark_columns;
  std::vector<VossMcCartney> flicker_gen;
  for (int c = 0; c < sensor.channels; ++c) {
    const auto uc = static_cast<std::uint64_t>(c);
    flicker_gen.clear();
    if (flicker) {
      for (int x = 0; x < total_cols; ++x) {
        flicker_gen.emplace_back(hash_key({s.seed, s.stream,
                                           static_cast<std::uint64_t>(StreamTag::kFlicker), uc,
                                           static_cast<std::uint64_t>(x)}));
      }
    }
    for (int r = 0; r < rows; ++r) {
      const double base = sensor.pedestal_dn + offsets[static_cast<std::size_t>(r)];
      const std::uint64_t row_key =
          hash_key({s.seed, s.stream, static_cast<std::uint64_t>(frame_index), uc,
                    static_cast<std::uint64_t>(r)});
      const std::uint64_t sample = sample_base + static_cast<std::uint64_t>(r);
      auto row = frame.pixels.row(c, r);
      for (int x = 0; x < sensor.width; ++x) {
        const std::uint64_t pk = mix64(row_key ^ (static_cast<std::uint64_t>(x) + 1) * kGoldenGamma);
        double signal_e = mean_signal_e;
        if (t.shot_enabled) {
          CounterRng rng(mix64(pk ^ static_cast<std::uint64_t>(StreamTag::kShot)));
          signal_e = static_cast<double>(rng.poisson(mean_signal_e));
        }
        double v = base + maps.pixel(c, r, x) + maps.column(c, x) +
                   signal_e * t.dn_per_electron * maps.gain(c, r, x);
        if (per_pixel_random) v += detail::temporal_terms(t, reset_sigma, pk);
        if (flicker) v += t.flicker_scale_dn * flicker_gen[static_cast<std::size_t>(x)].at(sample);
        row[static_cast<std::size_t>(x)] = quantize(v, max_code);
      }
      // Dark reference pixels: same row offset and temporal noise, no signal,
      // no fixed pattern.
      for (int d = 0; d < sensor.dark_columns; ++d) {
        const int x = sensor.width + d;
        const std::uint64_t pk = mix64(row_key ^ (static_cast<std::uint64_t>(x) + 1) * kGoldenGamma ^
                                       static_cast<std::uint64_t>(StreamTag::kDark));
        double v = base;
        if (per_pixel_random) v += detail::temporal_terms(t, reset_sigma, pk);
        if (flicker) v += t.flicker_scale_dn * flicker_gen[static_cast<std::size_t>(x)].at(sample);
        frame.dark_reference.at(c, r, d) = quantize(v, max_code);
      }
    }
  }
  return frame;
}

inline Frame simulate_frame(const SimScenario& s, int frame_index) {
  s.validate();
  return simulate_frame(s, frame_index, generate_fpn_maps(s.seed, s.sensor, s.spatial));
}

// Frames 0..n_frames-1 of one scenario; the fixed-pattern maps are shared.
inline ImageStack simulate_stack(const SimScenario& s, int n_frames) {
  if (n_frames < 1) throw DomainError("simulate_stack: n_frames must be >= 1");
  s.validate();
  const FpnMaps maps = generate_fpn_maps(s.seed, s.sensor, s.spatial);
  ImageStack out;
  out.reserve(static_cast<std::size_t>(n_frames));
  for (int i = 0; i < n_frames; ++i) out.push_back(simulate_frame(s, i, maps));
  return out;
}

}  // namespace rownoise

#endif  // ROWNOISE_SENSOR_SIM_HPP_
