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


#include "rownoise/sensor_sim.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "rownoise/row_noise.hpp"

namespace rownoise {
namespace {

SimScenario quiet(int width = 64, int rows = 100) {
  SimScenario s;
  s.sensor.width = width;
  s.sensor.active_rows = rows;
  s.sensor.blanking_rows = 12;
  s.temporal = TemporalNoiseConfig::none();
  s.spatial = SpatialNoiseConfig::none();
  return s;
}

TEST(SupplyNoiseSampleTest, Examples) {
  SupplyNoiseConfig s;
  s.frequency_hz = 1000.0;
  s.amplitude_vpp = 1.0;
  EXPECT_DOUBLE_EQ(supply_noise_sample(s, 0.0), 0.0);
  EXPECT_NEAR(supply_noise_sample(s, 1.0 / 4000.0), 0.5, 1e-12);
  s.rc_cutoff_hz = 100.0;
  // Peak over one period after the filter.
  double peak = 0.0;
  for (int i = 0; i < 10000; ++i) peak = std::max(peak, supply_noise_sample(s, i / 1e7));
  EXPECT_NEAR(peak, 0.04975, 1e-5);
}

TEST(QuantizeTest, RoundsHalfAwayAndClamps) {
  EXPECT_EQ(quantize(2.5), 3);
  EXPECT_EQ(quantize(2.49), 2);
  EXPECT_EQ(quantize(-3.0), 0);
  EXPECT_EQ(quantize(300.0), 255);
  EXPECT_EQ(quantize(100.0, 63), 63);
}

TEST(SimulateFrameTest, AllNoiseOffIsPedestal) {
  SimScenario s = quiet();
  s.sensor.pedestal_dn = 16.0;
  const Frame f = simulate_frame(s, 0);
  EXPECT_EQ(f.width(), 64);
  EXPECT_EQ(f.rows(), 100);
  for (std::uint8_t v : f.pixels.data()) ASSERT_EQ(v, 16);
}

TEST(SimulateFrameTest, HarmonicGivesNoRowVariation) {
  SimScenario s = quiet();
  s.supply.amplitude_vpp = 1.0;
  s.supply.phase_rad = 0.7;
  s.supply.frequency_hz = 3.0 * s.sensor.line_frequency();
  for (int i = 0; i < 3; ++i) {
    const Frame f = simulate_frame(s, i);
    const auto first = f.pixels.at(0, 0, 0);
    for (std::uint8_t v : f.pixels.data()) ASSERT_EQ(v, first);
    EXPECT_NE(first, 16);
  }
}

TEST(SimulateFrameTest, MidpointAlternatesBetweenTwoLevels) {
  SimScenario s = quiet();
  s.supply.amplitude_vpp = 1.0;
  s.supply.phase_rad = std::numbers::pi / 2;
  s.supply.frequency_hz = 1.5 * s.sensor.line_frequency();
  const auto means = row_means(simulate_frame(s, 0)).channels[0];
  std::set<double> levels(means.begin(), means.end());
  EXPECT_EQ(levels.size(), 2u);
  for (std::size_t r = 2; r < means.size(); ++r) EXPECT_EQ(means[r], means[r - 2]);
  EXPECT_NE(means[0], means[1]);
}

TEST(SimulateFrameTest, RowsAreUniformWithoutPixelNoise) {
  SimScenario s = quiet();
  s.supply.amplitude_vpp = 0.8;
  s.supply.frequency_hz = 31234.0;
  const Frame f = simulate_frame(s, 2);
  for (int r = 0; r < f.rows(); ++r) {
    const auto row = f.pixels.row(0, r);
    for (std::uint8_t v : row) ASSERT_EQ(v, row[0]);
  }
}

TEST(SimulateFrameTest, DeterministicAndMetadataFilled) {
  SimScenario s;
  s.sensor.width = 48;
  s.sensor.active_rows = 40;
  s.supply.amplitude_vpp = 0.5;
  s.supply.frequency_hz = 10000.0;
  const Frame a = simulate_frame(s, 1);
  EXPECT_EQ(a, simulate_frame(s, 1));
  EXPECT_EQ(a.metadata.seed, s.seed);
  EXPECT_EQ(a.metadata.scenario_hash, scenario_hash(s));
  EXPECT_EQ(a.index, 1);
  SimScenario other = s;
  other.stream = 1;
  EXPECT_NE(a.pixels, simulate_frame(other, 1).pixels);
}

TEST(SimulateFrameTest, ThreeChannelsAndDarkColumns) {
  SimScenario s = quiet(16, 20);
  s.sensor.channels = 3;
  s.sensor.dark_columns = 4;
  s.supply.amplitude_vpp = 1.0;
  s.supply.frequency_hz = 7000.0;
  const Frame f = simulate_frame(s, 0);
  EXPECT_EQ(f.channels(), 3);
  ASSERT_EQ(f.dark_reference.width(), 4);
  ASSERT_EQ(f.dark_reference.rows(), 20);
  // With no pixel noise, dark pixels carry exactly the row's level.
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 20; ++r) EXPECT_EQ(f.dark_reference.at(c, r, 3), f.pixels.at(c, r, 0));
}

TEST(SimulateFrameTest, RejectsInvalidScenario) {
  SimScenario s = quiet();
  s.sensor.width = 0;
  EXPECT_THROW(simulate_frame(s, 0), ConfigError);
  EXPECT_THROW(simulate_frame(quiet(), -1), DomainError);
}

TEST(SimulateStackTest, SingleFrameMatchesSimulateFrame) {
  SimScenario s;
  s.sensor.width = 32;
  s.sensor.active_rows = 24;
  const ImageStack st = simulate_stack(s, 1);
  ASSERT_EQ(st.size(), 1u);
  EXPECT_EQ(st[0], simulate_frame(s, 0));
  EXPECT_THROW(simulate_stack(s, 0), DomainError);
}

TEST(SimulateStackTest, FrozenNoiseGivesIdenticalFrames) {
  SimScenario s = quiet();
  s.supply.amplitude_vpp = 1.0;
  s.supply.phase_rad = 1.0;
  s.supply.frequency_hz = 2.0 * s.sensor.line_frequency();
  const ImageStack st = simulate_stack(s, 3);
  EXPECT_EQ(st[0].pixels, st[1].pixels);
  EXPECT_EQ(st[1].pixels, st[2].pixels);
}

TEST(SimulateStackTest, RandomPhaseFramesDifferButRowsStayUniform) {
  SimScenario s = quiet();
  s.supply.amplitude_vpp = 1.0;
  s.supply.frequency_hz = 5000.0;
  s.supply.phase_mode = PhaseMode::kRandomPerFrame;
  const ImageStack st = simulate_stack(s, 3);
  EXPECT_NE(st[0].pixels, st[1].pixels);
  EXPECT_NE(st[1].pixels, st[2].pixels);
  for (const Frame& f : st)
    for (int r = 0; r < f.rows(); ++r)
      for (std::uint8_t v : f.pixels.row(0, r)) ASSERT_EQ(v, f.pixels.at(0, r, 0));
}

TEST(FpnMapsTest, ZeroAndDeterministic) {
  SensorConfig sensor;
  sensor.width = 40;
  sensor.active_rows = 30;
  const FpnMaps zero = generate_fpn_maps(3, sensor, SpatialNoiseConfig::none());
  for (double v : zero.pixel_offset) ASSERT_EQ(v, 0.0);
  for (double v : zero.column_offset) ASSERT_EQ(v, 0.0);
  for (double v : zero.prnu_gain) ASSERT_EQ(v, 1.0);
  SpatialNoiseConfig sp;
  EXPECT_EQ(generate_fpn_maps(3, sensor, sp), generate_fpn_maps(3, sensor, sp));
  EXPECT_NE(generate_fpn_maps(3, sensor, sp), generate_fpn_maps(4, sensor, sp));
}

TEST(FpnMapsTest, DsnuSpreadMatchesRequest) {
  SensorConfig sensor;  // 1280 x 800
  SpatialNoiseConfig sp{2.0, 0.0, 0.0};
  const FpnMaps m = generate_fpn_maps(11, sensor, sp);
  double sum = 0.0, sq = 0.0;
  for (double v : m.pixel_offset) {
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(m.pixel_offset.size());
  const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
  EXPECT_NEAR(sd / 2.0, 1.0, 0.05);
}

TEST(RowOffsetsTest, PlateauAmplitudeInDn) {
  SimScenario s = quiet(8, 2000);
  s.supply.amplitude_vpp = 1.0;
  s.supply.frequency_hz = 1.37 * s.sensor.line_frequency();
  const auto off = row_offsets_dn(s, 0);
  double peak = 0.0;
  for (double v : off) peak = std::max(peak, std::abs(v));
  EXPECT_NEAR(peak, 0.5 * s.sensor.dn_per_volt, 0.5 * s.sensor.dn_per_volt * 0.01);
}

}  // namespace
}  // namespace rownoise
