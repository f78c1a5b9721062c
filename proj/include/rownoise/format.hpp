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

// Locale-independent number formatting and parsing.

#ifndef ROWNOISE_FORMAT_HPP_
#define ROWNOISE_FORMAT_HPP_

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace rownoise {

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
  std::string out(buf, res.ptr);
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
  return out;
}

// Shortest representation that round-trips ("25000", "0.5", "1e+20").
inline std::string format_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last) return std::nullopt;
  return v;
}

}  // namespace rownoise

#endif  // ROWNOISE_FORMAT_HPP_
