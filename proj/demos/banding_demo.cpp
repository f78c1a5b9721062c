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


// Walks one sensor configuration through the row-noise workflow: predict
// the banding for a few supply frequencies, simulate and measure it, then
// try the three mitigations.

#include <algorithm>
#include <iostream>
#include <string>

#include "rownoise/rownoise.hpp"

int main() {
  using namespace rownoise;

  SimScenario s;
  s.sensor.width = 320;
  s.sensor.active_rows = 240;
  s.sensor.blanking_rows = 10;
  s.sensor.fps = 60.0;
  s.sensor.pedestal_dn = 64.0;
  s.sensor.dark_columns = 8;
  s.supply.amplitude_vpp = 0.5;
  const double f_line = s.sensor.line_frequency();
  std::cout << "line frequency " << format_shortest(f_line) << " Hz\n\n";

  auto col = [](std::string v) {
    v.resize(std::max<std::size_t>(v.size() + 1, 12), ' ');
    return v;
  };
  std::cout << col("noise Hz") << col("alias Hz") << col("band rows") << "row noise DN\n";
  for (double mult : {1.0, 1.02, 1.25, 1.5, 2.0}) {
    s.supply.frequency_hz = mult * f_line;
    s.supply.phase_rad = 0.6;
    const auto a = physics::alias_and_band_height(s.supply.frequency_hz, f_line);
    const ImageStack stack = simulate_stack(s, 3);
    std::cout << col(format_fixed(s.supply.frequency_hz, 0)) << col(format_fixed(a.alias_hz, 0))
              << col(a.band_height_rows ? format_fixed(*a.band_height_rows, 2) : "uniform")
              << format_fixed(row_noise(stack).average, 4) << "\n";
  }

  s.supply.frequency_hz = 1.25 * f_line;
  const Frame frame = simulate_frame(s, 0);
  const Frame dark = mitigation::dark_reference_correct(frame, 8, s.sensor.pedestal_dn);
  const Frame low = mitigation::lowpass_offset_suppress(frame, 9);
  std::cout << "\nat " << format_shortest(s.supply.frequency_hz) << " Hz: raw "
            << format_fixed(row_noise_single(frame), 4) << " DN, dark reference "
            << format_fixed(row_noise_single(dark), 4) << " DN, low-pass "
            << format_fixed(row_noise_single(low), 4) << " DN\n";

  const auto t = mitigation::recommend_tuning(s.supply.frequency_hz, {60.0, 80.0}, {250, 250},
                                              mitigation::TuningMode::kSync);
  std::cout << "sync tuning: " << format_shortest(t.recommended_fps) << " fps puts the alias at "
            << format_shortest(t.resulting_alias_hz) << " Hz\n";
  std::cout << "RC filter with corner at noise/10 passes "
            << format_fixed(mitigation::predict_filter_effect(s.supply.frequency_hz,
                                                              s.supply.frequency_hz / 10.0), 4)
            << " of the amplitude\n";
  return 0;
}
