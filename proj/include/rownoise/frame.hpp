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

#ifndef ROWNOISE_FRAME_HPP_
#define ROWNOISE_FRAME_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rownoise/errors.hpp"

namespace rownoise {

// Channel-major 8-bit raster: all rows of channel 0, then channel 1, ...
class PixelGrid {
 public:
  PixelGrid() = default;
  PixelGrid(int width, int rows, int channels, std::uint8_t fill = 0)
      : width_(width), rows_(rows), channels_(channels) {
    if (width < 0 || rows < 0 || channels < 0) throw DomainError("PixelGrid: negative dimension");
    data_.assign(static_cast<std::size_t>(width) * rows * channels, fill);
  }

  int width() const { return width_; }
  int rows() const { return rows_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t at(int channel, int row, int col) const { return data_[offset(channel, row) + col]; }
  std::uint8_t& at(int channel, int row, int col) { return data_[offset(channel, row) + col]; }

  std::span<const std::uint8_t> row(int channel, int row) const {
    return {data_.data() + offset(channel, row), static_cast<std::size_t>(width_)};
  }
  std::span<std::uint8_t> row(int channel, int row) {
    return {data_.data() + offset(channel, row), static_cast<std::size_t>(width_)};
  }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  bool same_shape(const PixelGrid& other) const {
    return width_ == other.width_ && rows_ == other.rows_ && channels_ == other.channels_;
  }

  friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

 private:
  std::size_t offset(int channel, int row) const {
    return (static_cast<std::size_t>(channel) * rows_ + row) * width_;
  }

  int width_ = 0;
  int rows_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

struct FrameMetadata {
  std::uint64_t scenario_hash = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const FrameMetadata&, const FrameMetadata&) = default;
};

// One captured or simulated image. `pixels` holds every read-out row
// (optical black rows first, then active rows). `dark_reference` holds the
// per-row light-shielded reference columns when the sensor has them; it has
// the same row count and channel count as `pixels`, or is empty.
struct Frame {
  PixelGrid pixels;
  PixelGrid dark_reference;
  int index = 0;
  FrameMetadata metadata;

  int width() const { return pixels.width(); }
  int rows() const { return pixels.rows(); }
  int channels() const { return pixels.channels(); }

  friend bool operator==(const Frame&, const Frame&) = default;
};

// A stack is an ordered set of frames with identical geometry.
using ImageStack = std::vector<Frame>;

inline void check_stack(std::span<const Frame> frames) {
  if (frames.empty()) throw DomainError("image stack is empty");
  const PixelGrid& first = frames.front().pixels;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (!frames[i].pixels.same_shape(first)) {
      throw DomainError("image stack frame " + std::to_string(i) + " is " +
                        std::to_string(frames[i].width()) + "x" +
                        std::to_string(frames[i].rows()) + "x" +
                        std::to_string(frames[i].channels()) + ", expected " +
                        std::to_string(first.width()) + "x" + std::to_string(first.rows()) +
                        "x" + std::to_string(first.channels()));
    }
  }
}

}  // namespace rownoise

#endif  // ROWNOISE_FRAME_HPP_
