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

#ifndef ROWNOISE_PLOT_HPP_
#define ROWNOISE_PLOT_HPP_

#include <algorithm>
#include <filesystem>
#include <string>

#include "rownoise/errors.hpp"
#include "rownoise/format.hpp"
#include "rownoise/image_io.hpp"
#include "rownoise/sweep.hpp"

namespace rownoise {

// Self-contained SVG line chart of row noise against noise frequency.
inline std::string render_svg(const SweepResult& result) {
  if (result.points.empty()) throw DomainError("plot: sweep result is empty");
  constexpr double kW = 800, kH = 400, kLeft = 70, kRight = 20, kTop = 20, kBottom = 50;
  const auto& pts = result.points;
  const double fmin = pts.front().frequency_hz;
  const double fmax = pts.back().frequency_hz;
  double vmax = 0.0;
  for (const auto& p : pts) vmax = std::max(vmax, p.row_noise_dn);
  if (vmax <= 0.0) vmax = 1.0;
  const double fspan = fmax > fmin ? fmax - fmin : 1.0;
  auto px = [&](double f) { return kLeft + (f - fmin) / fspan * (kW - kLeft - kRight); };
  auto py = [&](double v) { return kH - kBottom - v / vmax * (kH - kTop - kBottom); };
  auto num = [](double v) { return format_fixed(v, 2); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kW) + "\" height=\"" + num(kH) +
       "\" viewBox=\"0 0 " + num(kW) + " " + num(kH) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kH - kBottom) + "\" x2=\"" + num(kW - kRight) +
       "\" y2=\"" + num(kH - kBottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(kH - kBottom) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num((kLeft + kW - kRight) / 2) + "\" y=\"" + num(kH - 10) +
       "\" text-anchor=\"middle\" font-size=\"14\">Noise frequency (Hz)</text>\n";
  s += "<text x=\"15\" y=\"" + num((kTop + kH - kBottom) / 2) + "\" transform=\"rotate(-90 15 " +
       num((kTop + kH - kBottom) / 2) +
       ")\" text-anchor=\"middle\" font-size=\"14\">Row noise (DN)</text>\n";
  s += "<text x=\"" + num(kLeft) + "\" y=\"" + num(kH - kBottom + 18) +
       "\" text-anchor=\"middle\" font-size=\"11\">" + format_shortest(fmin) + "</text>\n";
  s += "<text x=\"" + num(kW - kRight) + "\" y=\"" + num(kH - kBottom + 18) +
       "\" text-anchor=\"middle\" font-size=\"11\">" + format_shortest(fmax) + "</text>\n";
  s += "<text x=\"" + num(kLeft - 5) + "\" y=\"" + num(kTop + 4) +
       "\" text-anchor=\"end\" font-size=\"11\">" + format_fixed(vmax, 2) + "</text>\n";
  s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ' ';
    s += num(px(pts[i].frequency_hz)) + "," + num(py(pts[i].row_noise_dn));
  }
  s += "\"/>\n</svg>\n";
  return s;
}

// Whitespace-separated "frequency_hz row_noise" columns with a # header.
inline std::string render_plot_table(const SweepResult& result) {
  if (result.points.empty()) throw DomainError("plot: sweep result is empty");
  std::string s = "# frequency_hz row_noise_dn\n";
  for (const auto& p : result.points) {
    s += format_shortest(p.frequency_hz) + " " + format_fixed(p.row_noise_dn, 4) + "\n";
  }
  return s;
}

// Writes the SVG to svg_path and the data table next to it with a .dat
// extension.
inline void emit_plot_data(const SweepResult& result, const std::filesystem::path& svg_path) {
  const std::string svg = render_svg(result);
  const std::string table = render_plot_table(result);
  image_io::write_file(svg_path, svg);
  std::filesystem::path dat = svg_path;
  dat.replace_extension(".dat");
  image_io::write_file(dat, table);
}

}  // namespace rownoise

#endif  // ROWNOISE_PLOT_HPP_
