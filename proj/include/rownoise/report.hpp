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

// Characterization report: where row noise starts, where it peaks, and the
// frequency intervals whose row noise reaches a susceptibility threshold.

#ifndef ROWNOISE_REPORT_HPP_
#define ROWNOISE_REPORT_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rownoise/config.hpp"
#include "rownoise/errors.hpp"
#include "rownoise/format.hpp"
#include "rownoise/sweep.hpp"

namespace rownoise {

struct AbsoluteThreshold {
  double value = 0.0;
};

// mean + k * stddev of the first `window` points, which are assumed to be
// below the onset of susceptibility.
struct BaselineSigma {
  double k = 5.0;
  int window = 10;
};

using ThresholdMode = std::variant<AbsoluteThreshold, BaselineSigma>;

// Baseline spread is floored at the CSV resolution so that a perfectly flat
// baseline does not put the threshold on the baseline itself.
inline constexpr double kBaselineSigmaFloorDn = 1e-4;

struct FrequencyInterval {
  double lo_hz = 0.0;
  double hi_hz = 0.0;

  friend bool operator==(const FrequencyInterval&, const FrequencyInterval&) = default;
};

struct CharacterizationReport {
  std::optional<double> row_noise_start_hz;
  double peak_hz = 0.0;
  double peak_value = 0.0;
  std::vector<FrequencyInterval> areas_of_concern;
  double threshold_used = 0.0;

  friend bool operator==(const CharacterizationReport&, const CharacterizationReport&) = default;
};

inline double resolve_threshold(std::span<const SweepPoint> points, const ThresholdMode& mode) {
  if (const auto* abs = std::get_if<AbsoluteThreshold>(&mode)) return abs->value;
  const auto& b = std::get<BaselineSigma>(mode);
  if (b.window < 1) throw ConfigError("report: baseline window must be >= 1");
  if (static_cast<std::size_t>(b.window) > points.size()) {
    throw ConfigError("report: baseline window " + std::to_string(b.window) +
                      " exceeds the " + std::to_string(points.size()) + " sweep points");
  }
  const auto n = static_cast<std::size_t>(b.window);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += points[i].row_noise_dn;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss += (points[i].row_noise_dn - mean) * (points[i].row_noise_dn - mean);
  }
  const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return mean + b.k * std::max(sd, kBaselineSigmaFloorDn);
}

inline CharacterizationReport analyze_report(const SweepResult& result,
                                             const ThresholdMode& mode = BaselineSigma{}) {
  const auto& pts = result.points;
  if (pts.empty()) throw DomainError("report: sweep result is empty");
  CharacterizationReport rep;
  rep.threshold_used = resolve_threshold(pts, mode);

  rep.peak_hz = pts.front().frequency_hz;
  rep.peak_value = pts.front().row_noise_dn;
  for (const SweepPoint& p : pts) {
    if (p.row_noise_dn > rep.peak_value) {
      rep.peak_value = p.row_noise_dn;
      rep.peak_hz = p.frequency_hz;
    }
  }

  for (std::size_t i = 0; i < pts.size();) {
    if (pts[i].row_noise_dn < rep.threshold_used) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < pts.size() && pts[j + 1].row_noise_dn >= rep.threshold_used) ++j;
    rep.areas_of_concern.push_back({pts[i].frequency_hz, pts[j].frequency_hz});
    i = j + 1;
  }
  if (!rep.areas_of_concern.empty()) rep.row_noise_start_hz = rep.areas_of_concern.front().lo_hz;
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string format_khz(double hz) { return format_shortest(hz / 1000.0) + " kHz"; }

// Two-column table: event, electrical noise frequency.
inline std::string format_report_text(const CharacterizationReport& rep,
                                      const std::string& title = "Characterisation Analysis") {
  constexpr int kCol = 20;
  auto pad = [](std::string s) {
    s.resize(std::max<std::size_t>(s.size() + 1, kCol), ' ');
    return s;
  };
  std::string out = title + "\n";
  out += pad("Event") + "Electrical Noise Frequency\n";
  out += pad("Row Noise Start") +
         (rep.row_noise_start_hz ? format_khz(*rep.row_noise_start_hz) : std::string("none")) + "\n";
  out += pad("Peak Row Noise") + format_khz(rep.peak_hz) + " (" + format_fixed(rep.peak_value, 4) +
         " DN)\n";
  if (rep.areas_of_concern.empty()) {
    out += pad("Areas of Concern") + "no areas of concern\n";
  } else {
    bool first = true;
    for (const auto& a : rep.areas_of_concern) {
      const std::string span = a.lo_hz == a.hi_hz
                                   ? format_khz(a.lo_hz)
                                   : format_shortest(a.lo_hz / 1000.0) + " kHz - " + format_khz(a.hi_hz);
      out += pad(first ? "Areas of Concern" : "") + span + "\n";
      first = false;
    }
  }
  out += pad("Threshold") + format_fixed(rep.threshold_used, 4) + " DN\n";
  return out;
}

inline void to_json(json& j, const CharacterizationReport& rep) {
  json areas = json::array();
  for (const auto& a : rep.areas_of_concern) areas.push_back(json{{"lo_hz", a.lo_hz}, {"hi_hz", a.hi_hz}});
  j = json{{"Row Noise Start",
            rep.row_noise_start_hz ? json(*rep.row_noise_start_hz) : json(nullptr)},
           {"Peak Row Noise", json{{"frequency_hz", rep.peak_hz}, {"row_noise", rep.peak_value}}},
           {"Areas of Concern", areas},
           {"threshold", rep.threshold_used}};
}

}  // namespace rownoise

#endif  // ROWNOISE_REPORT_HPP_
