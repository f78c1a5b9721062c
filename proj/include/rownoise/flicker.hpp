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

#ifndef ROWNOISE_FLICKER_HPP_
#define ROWNOISE_FLICKER_HPP_

#include <cmath>
#include <cstdint>
#include <span>

#include "rownoise/counter_rng.hpp"
#include "rownoise/errors.hpp"

namespace rownoise {

// Voss-McCartney pink noise with random access. Octave j holds a Gaussian
// value that is redrawn every 2^j samples; the output is the normalized sum
// over octaves, so sample n depends only on (key, n). Unit variance.
class VossMcCartney {
 public:
  explicit VossMcCartney(std::uint64_t key, int octaves = 16) : key_(key), octaves_(octaves) {
    if (octaves < 1 || octaves > 48) throw DomainError("VossMcCartney: octaves must be in [1, 48]");
    norm_ = 1.0 / std::sqrt(static_cast<double>(octaves));
  }

  double at(std::uint64_t n) const {
    double sum = 0.0;
    for (int j = 0; j < octaves_; ++j) {
      CounterRng rng(hash_key({key_, static_cast<std::uint64_t>(j), n >> j}));
      sum += rng.gaussian();
    }
    return sum * norm_;
  }

  void fill(std::span<double> out, std::uint64_t first = 0) const {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(first + i);
  }

  int octaves() const { return octaves_; }

 private:
  std::uint64_t key_;
  int octaves_;
  double norm_;
};

}  // namespace rownoise

#endif  // ROWNOISE_FLICKER_HPP_
