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

// Binary PGM (P5) / PPM (P6) writer and reader, plus an uncompressed 24-bit
// BMP reader/writer. Only 8-bit samples are supported.

#ifndef ROWNOISE_IMAGE_IO_HPP_
#define ROWNOISE_IMAGE_IO_HPP_

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "rownoise/errors.hpp"
#include "rownoise/frame.hpp"

namespace rownoise::image_io {

enum class ImageFormat { kPgm, kPpm };

inline const char* extension(ImageFormat f) { return f == ImageFormat::kPgm ? ".pgm" : ".ppm"; }

inline ImageFormat format_for_channels(int channels) {
  if (channels == 1) return ImageFormat::kPgm;
  if (channels == 3) return ImageFormat::kPpm;
  throw DomainError("no portable image format for " + std::to_string(channels) + " channels");
}

// Encodes a grid as P5 (1 channel) or P6 (3 channels, interleaved RGB).
inline std::string encode_pnm(const PixelGrid& grid, ImageFormat format) {
  const int want = format == ImageFormat::kPgm ? 1 : 3;
  if (grid.channels() != want) {
    throw DomainError(std::string(format == ImageFormat::kPgm ? "PGM" : "PPM") + " requires " +
                      std::to_string(want) + " channel(s), frame has " +
                      std::to_string(grid.channels()));
  }
  std::string out = (want == 1 ? "P5\n" : "P6\n") + std::to_string(grid.width()) + " " +
                    std::to_string(grid.rows()) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + static_cast<std::size_t>(grid.width()) * grid.rows() * want);
  char* p = out.data() + header;
  for (int r = 0; r < grid.rows(); ++r) {
    for (int x = 0; x < grid.width(); ++x) {
      for (int c = 0; c < want; ++c) *p++ = static_cast<char>(grid.at(c, r, x));
    }
  }
  return out;
}

// Encodes a 3-channel grid as a bottom-up BI_RGB 24-bit BMP.
inline std::string encode_bmp(const PixelGrid& grid) {
  if (grid.channels() != 3) throw DomainError("BMP writer requires a 3-channel frame");
  const std::uint32_t stride = (static_cast<std::uint32_t>(grid.width()) * 3 + 3) & ~3u;
  const std::uint32_t payload = stride * static_cast<std::uint32_t>(grid.rows());
  std::string out(54 + payload, '\0');
  auto put16 = [&](std::size_t at, std::uint16_t v) {
    out[at] = static_cast<char>(v & 0xff);
    out[at + 1] = static_cast<char>(v >> 8);
  };
  auto put32 = [&](std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out[at + i] = static_cast<char>((v >> (8 * i)) & 0xff);
  };
  out[0] = 'B';
  out[1] = 'M';
  put32(2, 54 + payload);
  put32(10, 54);
  put32(14, 40);
  put32(18, static_cast<std::uint32_t>(grid.width()));
  put32(22, static_cast<std::uint32_t>(grid.rows()));
  put16(26, 1);
  put16(28, 24);
  put32(30, 0);
  put32(34, payload);
  for (int r = 0; r < grid.rows(); ++r) {
    char* p = out.data() + 54 + static_cast<std::size_t>(grid.rows() - 1 - r) * stride;
    for (int x = 0; x < grid.width(); ++x) {
      *p++ = static_cast<char>(grid.at(2, r, x));
      *p++ = static_cast<char>(grid.at(1, r, x));
      *p++ = static_cast<char>(grid.at(0, r, x));
    }
  }
  return out;
}

namespace detail {

class PnmHeaderReader {
 public:
  explicit PnmHeaderReader(std::string_view bytes) : bytes_(bytes), pos_(2) {}

  long next_int(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ParseError(std::string("PNM header: missing or invalid ") + field);
    }
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000'000L) throw ParseError(std::string("PNM header: ") + field + " too large");
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ParseError("PNM header: missing whitespace after maxval");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_;
};

inline Frame decode_pnm(std::string_view bytes) {
  const int channels = bytes[1] == '5' ? 1 : 3;
  PnmHeaderReader header(bytes);
  const long width = header.next_int("width");
  const long height = header.next_int("height");
  const long maxval = header.next_int("maxval");
  if (width < 1) throw ParseError("PNM header: width must be >= 1");
  if (height < 1) throw ParseError("PNM header: height must be >= 1");
  if (maxval < 1) throw ParseError("PNM header: maxval must be >= 1");
  if (maxval > 255) {
    throw ParseError("PNM header: maxval " + std::to_string(maxval) +
                     " unsupported (only 8-bit samples)");
  }
  const std::size_t start = header.raster_start();
  const std::size_t need = static_cast<std::size_t>(width) * height * channels;
  if (bytes.size() < start + need) {
    throw ParseError("PNM payload truncated: expected " + std::to_string(need) + " bytes, got " +
                     std::to_string(bytes.size() - std::min(bytes.size(), start)));
  }
  Frame frame;
  frame.pixels = PixelGrid(static_cast<int>(width), static_cast<int>(height), channels);
  const auto* p = reinterpret_cast<const std::uint8_t*>(bytes.data() + start);
  for (int r = 0; r < height; ++r) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) frame.pixels.at(c, r, x) = *p++;
    }
  }
  return frame;
}

inline std::uint32_t le32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(b[at + i]);
  return v;
}

inline std::uint16_t le16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<std::uint8_t>(b[at]) |
                                    (static_cast<std::uint8_t>(b[at + 1]) << 8));
}

inline Frame decode_bmp(std::string_view bytes) {
  if (bytes.size() < 54) throw ParseError("BMP header truncated: need 54 bytes");
  const std::uint32_t data_offset = le32(bytes, 10);
  const std::uint32_t dib_size = le32(bytes, 14);
  if (dib_size < 40) {
    throw ParseError("BMP dib_header_size " + std::to_string(dib_size) + " unsupported");
  }
  const auto width = static_cast<std::int32_t>(le32(bytes, 18));
  const auto height_raw = static_cast<std::int32_t>(le32(bytes, 22));
  const std::uint16_t bpp = le16(bytes, 28);
  const std::uint32_t compression = le32(bytes, 30);
  if (width < 1) throw ParseError("BMP width must be >= 1");
  if (height_raw == 0) throw ParseError("BMP height must be non-zero");
  if (bpp != 24) {
    throw ParseError("BMP bits_per_pixel " + std::to_string(bpp) + " unsupported (24 only)");
  }
  if (compression != 0) {
    throw ParseError("BMP compression " + std::to_string(compression) +
                     " unsupported (uncompressed only)");
  }
  const bool top_down = height_raw < 0;
  const std::int64_t height = top_down ? -static_cast<std::int64_t>(height_raw) : height_raw;
  const std::size_t stride = (static_cast<std::size_t>(width) * 3 + 3) & ~std::size_t{3};
  const std::size_t need = stride * static_cast<std::size_t>(height);
  if (bytes.size() < data_offset || bytes.size() - data_offset < need) {
    throw ParseError("BMP pixel data truncated: expected " + std::to_string(need) + " bytes");
  }
  Frame frame;
  frame.pixels = PixelGrid(width, static_cast<int>(height), 3);
  for (int r = 0; r < height; ++r) {
    const std::size_t stored_row = top_down ? r : static_cast<std::size_t>(height - 1 - r);
    const auto* p =
        reinterpret_cast<const std::uint8_t*>(bytes.data() + data_offset + stored_row * stride);
    for (int x = 0; x < width; ++x) {
      frame.pixels.at(2, r, x) = *p++;
      frame.pixels.at(1, r, x) = *p++;
      frame.pixels.at(0, r, x) = *p++;
    }
  }
  return frame;
}

}  // namespace detail

// Decodes P5, P6 or 24-bit BMP by magic number.
inline Frame decode_image(std::string_view bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return detail::decode_pnm(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') return detail::decode_bmp(bytes);
  throw ParseError("unknown image magic number");
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline Frame read_image(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return decode_image(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void write_image(const Frame& frame, const std::filesystem::path& path,
                        ImageFormat format) {
  write_file(path, encode_pnm(frame.pixels, format));
}

inline void write_bmp(const Frame& frame, const std::filesystem::path& path) {
  write_file(path, encode_bmp(frame.pixels));
}

inline bool has_image_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".pgm" || ext == ".ppm" || ext == ".bmp";
}

}  // namespace rownoise::image_io

#endif  // ROWNOISE_IMAGE_IO_HPP_
