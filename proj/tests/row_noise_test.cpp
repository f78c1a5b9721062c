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


#include "rownoise/row_noise.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "rownoise/counter_rng.hpp"

namespace rownoise {
namespace {

Frame from_rows(const std::vector<std::vector<int>>& rows) {
  Frame f;
  f.pixels = PixelGrid(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()), 1);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t x = 0; x < rows[r].size(); ++x)
      f.pixels.at(0, static_cast<int>(r), static_cast<int>(x)) = static_cast<std::uint8_t>(rows[r][x]);
  return f;
}

Frame random_frame(std::uint64_t key, int w, int h, int ch) {
  CounterRng rng(key);
  Frame f;
  f.pixels = PixelGrid(w, h, ch);
  for (std::uint8_t& v : f.pixels.data()) v = static_cast<std::uint8_t>(rng() & 0xff);
  return f;
}

TEST(RowMeansTest, Examples) {
  EXPECT_EQ(row_means(from_rows({{0, 10}, {20, 30}})).channels[0], (std::vector<double>{5, 25}));
  Frame c;
  c.pixels = PixelGrid(5, 4, 1, 77);
  const RowProfile p = row_means(c);
  for (double m : p.channels[0]) EXPECT_EQ(m, 77.0);
}

TEST(RowMeansTest, ChannelsAreIndependent) {
  Frame f;
  f.pixels = PixelGrid(3, 2, 3);
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 2; ++r)
      for (int x = 0; x < 3; ++x) f.pixels.at(c, r, x) = static_cast<std::uint8_t>(10 * c + r);
  const RowProfile p = row_means(f);
  ASSERT_EQ(p.channels.size(), 3u);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(p.channels[c], (std::vector<double>{10.0 * c, 10.0 * c + 1}));
  EXPECT_EQ(p.combined(), (std::vector<double>{10.0, 11.0}));
}

TEST(RowNoiseSingleTest, Examples) {
  Frame c;
  c.pixels = PixelGrid(8, 8, 1, 40);
  EXPECT_EQ(row_noise_single(c), 0.0);
  EXPECT_NEAR(row_noise_single(from_rows({{10, 10}, {20, 20}, {10, 10}, {20, 20}})), 5.7735, 1e-4);
}

TEST(RowNoiseSingleTest, AveragesChannelStds) {
  // Two-row channels whose rows differ by 6, 12 and 18 DN have sample stds
  // 6/sqrt(2), 12/sqrt(2) and 18/sqrt(2); their mean is 12/sqrt(2).
  Frame f;
  f.pixels = PixelGrid(2, 2, 3);
  const int diffs[] = {6, 12, 18};
  for (int c = 0; c < 3; ++c) {
    for (int x = 0; x < 2; ++x) {
      f.pixels.at(c, 0, x) = 100;
      f.pixels.at(c, 1, x) = static_cast<std::uint8_t>(100 + diffs[c]);
    }
  }
  EXPECT_NEAR(row_noise_single(f), 12.0 / std::sqrt(2.0), 1e-12);
}

TEST(RowNoiseSingleTest, ErrorsOnDegenerateFrames) {
  Frame one;
  one.pixels = PixelGrid(4, 1, 1);
  EXPECT_THROW(row_noise_single(one), DomainError);
  Frame empty;
  empty.pixels = PixelGrid(0, 4, 1);
  EXPECT_THROW(row_noise_single(empty), DomainError);
}

TEST(RowNoiseStackTest, AveragesAndChecksShapes) {
  const Frame a = random_frame(1, 8, 6, 1);
  const Frame b = random_frame(2, 8, 6, 1);
  const Frame c = random_frame(3, 8, 6, 1);
  const ImageStack st{a, b, c};
  const RowNoiseResult r = row_noise(st);
  ASSERT_EQ(r.per_frame.size(), 3u);
  EXPECT_NEAR(r.average, (r.per_frame[0] + r.per_frame[1] + r.per_frame[2]) / 3.0, 1e-15);
  EXPECT_EQ(r.n_frames, 3);

  const ImageStack same{a, a, a};
  EXPECT_DOUBLE_EQ(row_noise(same).average, row_noise_single(a));

  const ImageStack mixed{a, random_frame(4, 9, 6, 1)};
  try {
    row_noise(mixed);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("frame 1"), std::string::npos);
  }
  EXPECT_THROW(row_noise(ImageStack{}), DomainError);
}

TEST(RowNoiseOracleTest, AgreesOnRandomFrames) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Frame f = random_frame(hash_key({2026, i}), 32, 32, 3);
    ASSERT_NEAR(row_noise_single(f), testing::oracle_row_noise(f), 1e-9);
  }
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Frame f = random_frame(hash_key({7, i}), 1 + static_cast<int>(i), 2 + static_cast<int>(i % 5), 1);
    ASSERT_NEAR(row_noise_single(f), testing::oracle_row_noise(f), 1e-9);
  }
}

TEST(RowNoisePropertyTest, InvariantUnderColumnPermutationAndRowOffsetShift) {
  const Frame f = random_frame(99, 16, 12, 1);
  Frame g = f;
  for (int r = 0; r < g.rows(); ++r) {
    auto row = g.pixels.row(0, r);
    std::reverse(row.begin(), row.end());
  }
  EXPECT_NEAR(row_noise_single(f), row_noise_single(g), 1e-12);

  // Adding the same constant to every pixel leaves the metric unchanged.
  Frame c;
  c.pixels = PixelGrid(4, 6, 1);
  for (int r = 0; r < 6; ++r)
    for (int x = 0; x < 4; ++x) c.pixels.at(0, r, x) = static_cast<std::uint8_t>(10 + 3 * r + x);
  Frame d = c;
  for (std::uint8_t& v : d.pixels.data()) v = static_cast<std::uint8_t>(v + 50);
  EXPECT_NEAR(row_noise_single(c), row_noise_single(d), 1e-12);
}

TEST(BandHeightTest, Examples) {
  std::vector<double> alt(64);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? 30.0 : 10.0;
  EXPECT_EQ(band_height_measure(alt), 1.0);

  std::vector<double> sine(200);
  for (std::size_t i = 0; i < sine.size(); ++i) sine[i] = 50.0 + 5.0 * std::sin(2 * std::numbers::pi * i / 20.0);
  EXPECT_EQ(band_height_measure(sine), 10.0);

  EXPECT_FALSE(band_height_measure(std::vector<double>(50, 3.0)).has_value());
  EXPECT_THROW(band_height_measure(std::vector<double>(7, 1.0)), DomainError);
}

TEST(BandHeightTest, SpectrumReportsAmplitude) {
  std::vector<double> sine(256);
  for (std::size_t i = 0; i < sine.size(); ++i) sine[i] = 4.0 * std::cos(2 * std::numbers::pi * 8 * i / 256.0);
  const BandSpectrum s = band_spectrum(sine);
  EXPECT_EQ(s.dominant_bin, 8u);
  EXPECT_NEAR(s.dominant_amplitude, 4.0, 1e-9);
  EXPECT_EQ(*s.band_height_rows, 16.0);
}

}  // namespace
}  // namespace rownoise
