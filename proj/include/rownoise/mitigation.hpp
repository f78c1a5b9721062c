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

// Row-noise mitigation: post-capture correction of frames, line-frequency
// tuning, and supply-filter attenuation.

#ifndef ROWNOISE_MITIGATION_HPP_
#define ROWNOISE_MITIGATION_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "rownoise/errors.hpp"
#include "rownoise/frame.hpp"
#include "rownoise/physics.hpp"
#include "rownoise/sensor_sim.hpp"

namespace rownoise::mitigation {

// Subtracts each row's dark-reference offset (mean of the first m reference
// pixels of that row, minus the pedestal) from every pixel of the row. The
// result keeps the frame's geometry and reference block.
inline Frame dark_reference_correct(const Frame& frame, int m_dark_cols,
                                    const PixelGrid& dark_pixels, double pedestal_dn) {
  if (m_dark_cols < 1) throw DomainError("dark_reference_correct: need at least 1 dark column");
  if (m_dark_cols > dark_pixels.width()) {
    throw DomainError("dark_reference_correct: requested " + std::to_string(m_dark_cols) +
                      " dark columns, source has " + std::to_string(dark_pixels.width()));
  }
  if (dark_pixels.rows() != frame.rows() || dark_pixels.channels() != frame.channels()) {
    throw DomainError("dark_reference_correct: dark pixels do not match frame rows/channels");
  }
  Frame out = frame;
  for (int c = 0; c < frame.channels(); ++c) {
    for (int r = 0; r < frame.rows(); ++r) {
      double sum = 0.0;
      for (int d = 0; d < m_dark_cols; ++d) sum += dark_pixels.at(c, r, d);
      const double offset = sum / m_dark_cols - pedestal_dn;
      for (std::uint8_t& px : out.pixels.row(c, r)) px = quantize(px - offset);
    }
  }
  return out;
}

inline Frame dark_reference_correct(const Frame& frame, int m_dark_cols, double pedestal_dn) {
  return dark_reference_correct(frame, m_dark_cols, frame.dark_reference, pedestal_dn);
}

enum class LowpassKind {
  // Window mean after dropping its lowest and highest sample. An isolated
  // band row is discarded from its neighbours' estimates, and periodic
  // banding still averages out.
  kTrimmedMean,
  // A median locks onto the majority phase of period-2 and period-4 bands
  // and leaves them in place.
  kMedian,
  kMovingAverage,
};

namespace detail {

inline double trimmed_mean_of(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) sum += v[i];
  return sum / static_cast<double>(v.size() - 2);
}

inline double median_of(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

}  // namespace detail

// Low-pass each column vertically (edge-replicated window of kernel_rows),
// take the high-pass residual, estimate each row's offset as the median of
// its residuals across columns, and subtract that offset from the row.
inline Frame lowpass_offset_suppress(const Frame& frame, int kernel_rows,
                                     LowpassKind kind = LowpassKind::kTrimmedMean) {
  if (kernel_rows < 3 || kernel_rows % 2 == 0) {
    throw DomainError("lowpass_offset_suppress: kernel must be odd and >= 3");
  }
  if (kernel_rows > frame.rows()) {
    throw DomainError("lowpass_offset_suppress: kernel larger than frame height");
  }
  const int rows = frame.rows();
  const int width = frame.width();
  const int half = kernel_rows / 2;
  Frame out = frame;
  std::vector<double> lowpass(static_cast<std::size_t>(rows) * width);
  std::vector<double> window(static_cast<std::size_t>(kernel_rows));
  std::vector<double> residual(static_cast<std::size_t>(width));

  for (int c = 0; c < frame.channels(); ++c) {
    for (int x = 0; x < width; ++x) {
      for (int r = 0; r < rows; ++r) {
        for (int k = -half; k <= half; ++k) {
          const int rr = std::clamp(r + k, 0, rows - 1);
          window[static_cast<std::size_t>(k + half)] = frame.pixels.at(c, rr, x);
        }
        double lp = 0.0;
        if (kind == LowpassKind::kTrimmedMean) {
          lp = detail::trimmed_mean_of(window);
        } else if (kind == LowpassKind::kMedian) {
          lp = detail::median_of(window);
        } else {
          for (double v : window) lp += v;
          lp /= kernel_rows;
        }
        lowpass[static_cast<std::size_t>(r) * width + x] = lp;
      }
    }
    for (int r = 0; r < rows; ++r) {
      for (int x = 0; x < width; ++x) {
        residual[static_cast<std::size_t>(x)] =
            frame.pixels.at(c, r, x) - lowpass[static_cast<std::size_t>(r) * width + x];
      }
      const double offset = detail::median_of(residual);
      for (std::uint8_t& px : out.pixels.row(c, r)) px = quantize(px - offset);
    }
  }
  return out;
}

enum class TuningMode {
  kSync,           // drive the alias frequency to 0: uniform offset, no bands
  kMaxSeparation,  // drive it to f_line/2: one-row bands
};

struct TuningRecommendation {
  double recommended_fps = 0.0;
  int recommended_frame_length = 0;
  double line_frequency_hz = 0.0;
  double resulting_alias_hz = 0.0;
  physics::BandHeight predicted_band_height_rows;
  TuningMode mode = TuningMode::kMaxSeparation;
};

struct FpsRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct FrameLengthRange {
  int lo = 0;
  int hi = 0;
};

inline constexpr double kFpsStep = 0.01;

// Exhaustive search over fps (0.01 steps) x integer frame lengths. Ties go to
// the lower fps, then the lower frame length.
inline TuningRecommendation recommend_tuning(double f_noise_hz, FpsRange fps,
                                             FrameLengthRange frame_length, TuningMode mode) {
  if (!(f_noise_hz > 0.0)) throw DomainError("recommend_tuning: noise frequency must be > 0");
  // Work in integer hundredths of a frame per second.
  const auto lo_c = static_cast<long long>(std::ceil(fps.lo / kFpsStep - 1e-9));
  const auto hi_c = static_cast<long long>(std::floor(fps.hi / kFpsStep + 1e-9));
  if (lo_c > hi_c || lo_c < 1) throw DomainError("recommend_tuning: empty or non-positive fps range");
  if (frame_length.lo > frame_length.hi || frame_length.lo < 1) {
    throw DomainError("recommend_tuning: empty or non-positive frame length range");
  }
  constexpr double kTieTolerance = 1e-9;
  TuningRecommendation best;
  best.mode = mode;
  bool have = false;
  for (long long fc = lo_c; fc <= hi_c; ++fc) {
    const double f = static_cast<double>(fc) / 100.0;
    for (int len = frame_length.lo; len <= frame_length.hi; ++len) {
      const double f_line = physics::line_frequency(f, len);
      const auto a = physics::alias_and_band_height(f_noise_hz, f_line);
      const bool better = !have || (mode == TuningMode::kSync
                                        ? a.alias_hz < best.resulting_alias_hz - kTieTolerance
                                        : a.alias_hz > best.resulting_alias_hz + kTieTolerance);
      if (better) {
        best.recommended_fps = f;
        best.recommended_frame_length = len;
        best.line_frequency_hz = f_line;
        best.resulting_alias_hz = a.alias_hz;
        best.predicted_band_height_rows = a.band_height_rows;
        have = true;
      }
    }
  }
  return best;
}

// First-order RC low-pass magnitude response at frequency_hz.
inline double predict_filter_effect(double frequency_hz, double cutoff_hz) {
  if (!(frequency_hz > 0.0)) throw DomainError("predict_filter_effect: frequency must be > 0");
  if (!(cutoff_hz > 0.0)) throw DomainError("predict_filter_effect: cutoff must be > 0");
  const double ratio = frequency_hz / cutoff_hz;
  return 1.0 / std::sqrt(1.0 + ratio * ratio);
}

}  // namespace rownoise::mitigation

#endif  // ROWNOISE_MITIGATION_HPP_
