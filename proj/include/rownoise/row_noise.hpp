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

// Row-noise magnitude of an image.
//
// For each channel, take the mean of every row, then the sample standard
// deviation (N-1 divisor) of those row means. The frame's row noise is the
// unweighted mean over channels. Averaging the per-frame value over several
// captures of the same condition suppresses temporal noise.

#ifndef ROWNOISE_ROW_NOISE_HPP_
#define ROWNOISE_ROW_NOISE_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "rownoise/errors.hpp"
#include "rownoise/frame.hpp"
#include "rownoise/physics.hpp"

namespace rownoise {

struct RowProfile {
  // channels[c][r] = mean DN of row r in channel c.
  std::vector<std::vector<double>> channels;

  std::size_t rows() const { return channels.empty() ? 0 : channels.front().size(); }

  // Unweighted average across channels, row by row.
  std::vector<double> combined() const {
    std::vector<double> out(rows(), 0.0);
    for (const auto& ch : channels) {
      for (std::size_t r = 0; r < out.size(); ++r) out[r] += ch[r];
    }
    for (double& v : out) v /= static_cast<double>(channels.size());
    return out;
  }
};

struct RowNoiseResult {
  std::vector<double> per_frame;
  double average = 0.0;
  int n_frames = 0;
  int channels = 0;
};

inline RowProfile row_means(const Frame& frame) {
  RowProfile p;
  p.channels.assign(static_cast<std::size_t>(frame.channels()),
                    std::vector<double>(static_cast<std::size_t>(frame.rows()), 0.0));
  for (int c = 0; c < frame.channels(); ++c) {
    for (int r = 0; r < frame.rows(); ++r) {
      const auto row = frame.pixels.row(c, r);
      const std::uint64_t sum = std::accumulate(row.begin(), row.end(), std::uint64_t{0});
      p.channels[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)] =
          static_cast<double>(sum) / static_cast<double>(row.size());
    }
  }
  return p;
}

// Sample standard deviation, two-pass.
inline double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) throw DomainError("sample_stddev: need at least 2 values");
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

inline double row_noise_single(const Frame& frame) {
  if (frame.rows() < 2) throw DomainError("row_noise_single: frame needs at least 2 rows");
  if (frame.channels() < 1 || frame.width() < 1) throw DomainError("row_noise_single: empty frame");
  const RowProfile p = row_means(frame);
  double total = 0.0;
  for (const auto& ch : p.channels) total += sample_stddev(ch);
  return total / static_cast<double>(p.channels.size());
}

inline RowNoiseResult row_noise(std::span<const Frame> stack) {
  check_stack(stack);
  RowNoiseResult out;
  out.n_frames = static_cast<int>(stack.size());
  out.channels = stack.front().channels();
  out.per_frame.reserve(stack.size());
  for (const Frame& f : stack) out.per_frame.push_back(row_noise_single(f));
  out.average = std::accumulate(out.per_frame.begin(), out.per_frame.end(), 0.0) /
                static_cast<double>(out.per_frame.size());
  return out;
}

// RMS of the mean-removed profile below which it is reported as uniform.
inline constexpr double kBandUniformEpsilonDn = 1e-6;

struct BandSpectrum {
  std::size_t dominant_bin = 0;   // cycles per profile length
  double dominant_amplitude = 0;  // DN
  physics::BandHeight band_height_rows;
};

// DFT of the mean-removed row profile. The dominant bin k gives a band period
// of rows/k and a band height of half that period.
inline BandSpectrum band_spectrum(std::span<const double> profile,
                                  double epsilon = kBandUniformEpsilonDn) {
  const std::size_t n = profile.size();
  if (n < 8) throw DomainError("band_height_measure: profile needs at least 8 rows");
  const double mean = std::accumulate(profile.begin(), profile.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x(n);
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = profile[i] - mean;
    energy += x[i] * x[i];
  }
  BandSpectrum out;
  if (std::sqrt(energy / static_cast<double>(n)) < epsilon) return out;

  const double w = -2.0 * std::numbers::pi / static_cast<double>(n);
  double best = -1.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      // Index product reduced mod n keeps the twiddle argument small.
      const double ang = w * static_cast<double>((k * i) % n);
      acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    const double mag = std::abs(acc);
    if (mag > best) {
      best = mag;
      out.dominant_bin = k;
    }
  }
  const double scale = (2 * out.dominant_bin == n) ? 1.0 : 2.0;
  out.dominant_amplitude = scale * best / static_cast<double>(n);
  out.band_height_rows = static_cast<double>(n) / static_cast<double>(out.dominant_bin) / 2.0;
  return out;
}

inline physics::BandHeight band_height_measure(std::span<const double> profile,
                                               double epsilon = kBandUniformEpsilonDn) {
  return band_spectrum(profile, epsilon).band_height_rows;
}

inline physics::BandHeight band_height_measure(const RowProfile& profile,
                                               double epsilon = kBandUniformEpsilonDn) {
  return band_height_measure(profile.combined(), epsilon);
}

}  // namespace rownoise

#endif  // ROWNOISE_ROW_NOISE_HPP_
