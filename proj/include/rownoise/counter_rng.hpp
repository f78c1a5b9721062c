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

// Counter-based random streams. A stream is identified by a 64-bit key
// derived from structured coordinates (seed, frame, row, column, source), and
// the n-th draw of a stream is a pure function of (key, n). Any pixel can
// therefore be regenerated independently of evaluation order or thread count.

#ifndef ROWNOISE_COUNTER_RNG_HPP_
#define ROWNOISE_COUNTER_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <string_view>

namespace rownoise {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive hash of a coordinate tuple.
constexpr std::uint64_t hash_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p + kGoldenGamma));
  return h;
}

// FNV-1a, used for content hashes of serialized configs.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Tags separating the noise sources that share a pixel coordinate.
enum class StreamTag : std::uint64_t {
  kShot = 1,
  kRead = 2,
  kReset = 3,
  kFlicker = 4,
  kPixelOffset = 5,
  kColumnOffset = 6,
  kPrnu = 7,
  kPhase = 8,
  kDark = 9,
};

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (++counter_) * kGoldenGamma); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_pos() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

  // Standard normal via Box-Muller; one output per two draws, no cached state.
  double gaussian() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Poisson variate. Multiplication method below mean 10, otherwise the PTRS
  // transformed-rejection sampler (Hormann 1993).
  std::int64_t poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean < 10.0) {
      const double limit = std::exp(-mean);
      double prod = uniform_pos();
      std::int64_t k = 0;
      while (prod > limit) {
        prod *= uniform_pos();
        ++k;
      }
      return k;
    }
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::fabs(u);
      const auto k = static_cast<std::int64_t>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
      if (us >= 0.07 && v <= vr) return k;
      if (k < 0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
          -mean + static_cast<double>(k) * loglam - std::lgamma(static_cast<double>(k) + 1.0)) {
        return k;
      }
    }
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rownoise

#endif  // ROWNOISE_COUNTER_RNG_HPP_
