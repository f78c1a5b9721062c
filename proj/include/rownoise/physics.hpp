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

// Closed-form noise and photodetection calculators for CMOS image sensors,
// plus the line-frequency alias model that predicts row-noise band height.
//
// Every function here is pure. Invalid arguments raise DomainError.

#ifndef ROWNOISE_PHYSICS_HPP_
#define ROWNOISE_PHYSICS_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "rownoise/errors.hpp"

namespace rownoise::physics {

// CODATA 2018 exact values; silicon band gap at room temperature.
struct PhysicalConstants {
  static constexpr double boltzmann_k = 1.380649e-23;     // J/K
  static constexpr double planck_h = 6.62607015e-34;      // J*s
  static constexpr double light_speed_c = 2.99792458e8;   // m/s
  static constexpr double elementary_charge = 1.602176634e-19;  // C (J/eV)
  static constexpr double silicon_bandgap_ev = 1.1;       // eV
  static constexpr double hc_ev_nm = 1239.841984;         // eV*nm
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

}  // namespace detail

inline double photon_energy_ev(double wavelength_nm) {
  detail::require(wavelength_nm > 0.0, "photon_energy_ev: wavelength must be > 0");
  return PhysicalConstants::hc_ev_nm / wavelength_nm;
}

// True when a photon of this wavelength carries at least the silicon band gap.
inline bool can_excite_silicon(double wavelength_nm) {
  return photon_energy_ev(wavelength_nm) >= PhysicalConstants::silicon_bandgap_ev;
}

// Percentage of the pixel area that is photosensitive.
inline double fill_factor(double photosensitive_area, double pixel_area) {
  detail::require(pixel_area > 0.0, "fill_factor: pixel area must be > 0");
  detail::require(photosensitive_area >= 0.0 && photosensitive_area <= pixel_area,
                  "fill_factor: photosensitive area must lie in [0, pixel area]");
  return 100.0 * photosensitive_area / pixel_area;
}

// Poisson standard deviation of a photon or electron count.
inline double shot_noise_sigma(double mean_count) {
  detail::require(mean_count >= 0.0, "shot_noise_sigma: mean must be >= 0");
  return std::sqrt(mean_count);
}

// Shot-noise-limited SNR of a signal of mean_electrons.
inline double snr_max(double mean_electrons) {
  detail::require(mean_electrons >= 0.0, "snr_max: mean must be >= 0");
  return std::sqrt(mean_electrons);
}

// kTC noise voltage on a capacitance after reset.
inline double reset_noise_v(double temp_k, double cap_f) {
  detail::require(temp_k > 0.0, "reset_noise_v: temperature must be > 0");
  detail::require(cap_f > 0.0, "reset_noise_v: capacitance must be > 0");
  return std::sqrt(PhysicalConstants::boltzmann_k * temp_k / cap_f);
}

// Johnson noise power spectral density, V^2/Hz.
inline double thermal_noise_psd(double temp_k, double r_ohm) {
  detail::require(temp_k > 0.0, "thermal_noise_psd: temperature must be > 0");
  detail::require(r_ohm > 0.0, "thermal_noise_psd: resistance must be > 0");
  return 4.0 * PhysicalConstants::boltzmann_k * temp_k * r_ohm;
}

// Open-circuit Johnson noise voltage over bandwidth bw_hz.
inline double thermal_noise_v(double temp_k, double r_ohm, double bw_hz) {
  detail::require(bw_hz > 0.0, "thermal_noise_v: bandwidth must be > 0");
  return std::sqrt(thermal_noise_psd(temp_k, r_ohm) * bw_hz);
}

// Flicker noise PSD kf / (cox * w * l) / f. The 1/(w*l) area scaling is the
// only absolute statement available for flicker magnitude.
inline double flicker_psd(double kf, double cox, double width_um, double length_um,
                          double freq_hz) {
  detail::require(kf > 0.0, "flicker_psd: kf must be > 0");
  detail::require(cox > 0.0, "flicker_psd: cox must be > 0");
  detail::require(width_um > 0.0 && length_um > 0.0, "flicker_psd: gate area must be > 0");
  detail::require(freq_hz > 0.0, "flicker_psd: frequency must be > 0");
  return kf / (cox * width_um * length_um) / freq_hz;
}

// RMS error of a uniform quantizer with step v_lsb.
inline double quantization_noise(double v_lsb) {
  detail::require(v_lsb > 0.0, "quantization_noise: LSB must be > 0");
  return v_lsb / std::sqrt(12.0);
}

// Photo-response non-uniformity in rms electrons for a signal in electrons.
inline double prnu_sigma(double quality_factor, double signal_e) {
  detail::require(quality_factor >= 0.0, "prnu_sigma: quality factor must be >= 0");
  detail::require(signal_e >= 0.0, "prnu_sigma: signal must be >= 0");
  return quality_factor * signal_e;
}

// Row readout rate; frame_length_rows counts every row time in a frame,
// including blanking.
inline double line_frequency(double fps, double frame_length_rows) {
  detail::require(fps > 0.0, "line_frequency: fps must be > 0");
  detail::require(frame_length_rows >= 1.0, "line_frequency: frame length must be >= 1 row");
  return fps * frame_length_rows;
}

// Height in rows of one row-noise band; nullopt means the offset is the same
// on every row (no banding).
using BandHeight = std::optional<double>;

struct AliasResult {
  double alias_hz = 0.0;
  BandHeight band_height_rows;

  bool uniform() const { return !band_height_rows.has_value(); }
};

// Folds f_noise onto [0, f_line/2] relative to the nearest line-frequency
// harmonic. The band is half of one alias period expressed in row times.
inline AliasResult alias_and_band_height(double f_noise, double f_line) {
  detail::require(f_line > 0.0, "alias_and_band_height: line frequency must be > 0");
  detail::require(f_noise >= 0.0, "alias_and_band_height: noise frequency must be >= 0");
  const double r = std::fmod(f_noise, f_line);
  AliasResult out;
  out.alias_hz = std::min(r, f_line - r);
  if (out.alias_hz > 0.0) out.band_height_rows = f_line / (2.0 * out.alias_hz);
  return out;
}

}  // namespace rownoise::physics

#endif  // ROWNOISE_PHYSICS_HPP_
