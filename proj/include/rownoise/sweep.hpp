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

// Frequency-sweep characterization: for each supply-noise frequency step,
// obtain a stack of dark frames (simulated, or captured by an external
// command), measure the averaged row noise, and collect the susceptibility
// curve. Results persist as a two-column CSV.

#ifndef ROWNOISE_SWEEP_HPP_
#define ROWNOISE_SWEEP_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rownoise/config.hpp"
#include "rownoise/errors.hpp"
#include "rownoise/format.hpp"
#include "rownoise/image_io.hpp"
#include "rownoise/row_noise.hpp"
#include "rownoise/sensor_sim.hpp"

namespace rownoise {

// Hardware-in-the-loop hook. The command is run once per step after
// substituting {freq} (integer Hz) and {amp} (Vpp); it must write
// frames_per_step new images into image_dir.
struct CaptureSource {
  std::string command_template;
  std::filesystem::path image_dir;

  friend bool operator==(const CaptureSource&, const CaptureSource&) = default;
};

struct SweepConfig {
  double start_hz = 50.0;
  double end_hz = 1e6;
  double step_hz = 1000.0;
  double amplitude_vpp = 1.0;
  int frames_per_step = 3;
  // Template for simulated steps; frequency, amplitude, seed and stream are
  // overwritten per step.
  SimScenario scenario;
  std::optional<CaptureSource> capture;
  std::uint64_t seed = 1;
  int workers = 1;

  void validate() const {
    if (!std::isfinite(start_hz) || !std::isfinite(end_hz) || start_hz < 0.0) {
      throw ConfigError("sweep: start_hz must be finite and >= 0");
    }
    if (!(step_hz > 0.0)) throw ConfigError("sweep: step_hz must be > 0");
    if (start_hz > end_hz) throw ConfigError("sweep: start_hz must be <= end_hz");
    if (!(amplitude_vpp >= 0.0)) throw ConfigError("sweep: amplitude_vpp must be >= 0");
    if (frames_per_step < 1) throw ConfigError("sweep: frames_per_step must be >= 1");
    if (workers < 1) throw ConfigError("sweep: workers must be >= 1");
    if (capture) {
      const std::string& t = capture->command_template;
      if (t.find("{freq}") == std::string::npos || t.find("{amp}") == std::string::npos) {
        throw ConfigError("sweep: capture command must contain {freq} and {amp}");
      }
    } else {
      scenario.validate();
    }
  }

  std::size_t point_count() const {
    return static_cast<std::size_t>(std::floor((end_hz - start_hz) / step_hz + 1e-9)) + 1;
  }

  double frequency_at(std::size_t i) const { return start_hz + static_cast<double>(i) * step_hz; }

  // Scenario simulated at step i: the sensor's fixed pattern is shared by
  // every step, the temporal noise stream is keyed by the step index.
  SimScenario step_scenario(std::size_t i) const {
    SimScenario s = scenario;
    s.supply.frequency_hz = frequency_at(i);
    s.supply.amplitude_vpp = amplitude_vpp;
    s.seed = seed;
    s.stream = i;
    return s;
  }

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct SweepPoint {
  double frequency_hz = 0.0;
  double row_noise_dn = 0.0;
  int n_frames = 0;  // 0 when unknown (e.g. loaded from CSV)

  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  SweepConfig config;
  // Set when a step failed; points then hold the steps completed before it.
  std::optional<std::string> error;

  bool complete() const { return !error.has_value(); }
};

// ---------------------------------------------------------------------------
// Capture hook

inline std::string expand_capture_command(const std::string& tmpl, double freq_hz, double amp_vpp) {
  std::string amp = format_shortest(amp_vpp);
  if (amp.find_first_of(".e") == std::string::npos) amp += ".0";
  const std::string freq = std::to_string(std::llround(freq_hz));
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl.compare(i, 6, "{freq}") == 0) {
      out += freq;
      i += 6;
    } else if (tmpl.compare(i, 5, "{amp}") == 0) {
      out += amp;
      i += 5;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

namespace detail {

using FileStamps = std::map<std::filesystem::path, std::filesystem::file_time_type>;

inline FileStamps image_stamps(const std::filesystem::path& dir) {
  FileStamps out;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && image_io::has_image_extension(e.path())) {
      out[e.path()] = e.last_write_time();
    }
  }
  return out;
}

// Runs the capture command and returns the images it created or rewrote,
// in lexicographic order.
inline ImageStack capture_step(const CaptureSource& src, double freq_hz, double amp_vpp,
                               int frames) {
  const FileStamps before = image_stamps(src.image_dir);
  const std::string cmd = expand_capture_command(src.command_template, freq_hz, amp_vpp);
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    throw IoError("capture command failed (status " + std::to_string(rc) + "): " + cmd);
  }
  std::vector<std::filesystem::path> fresh;
  for (const auto& [path, stamp] : image_stamps(src.image_dir)) {
    auto it = before.find(path);
    if (it == before.end() || it->second != stamp) fresh.push_back(path);
  }
  if (static_cast<int>(fresh.size()) < frames) {
    throw IoError("capture at " + std::to_string(std::llround(freq_hz)) + " Hz produced " +
                  std::to_string(fresh.size()) + " image(s) in " + src.image_dir.string() +
                  ", expected " + std::to_string(frames));
  }
  std::sort(fresh.begin(), fresh.end());
  ImageStack stack;
  for (int i = 0; i < frames; ++i) stack.push_back(image_io::read_image(fresh[static_cast<std::size_t>(i)]));
  return stack;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sweep

using SweepProgress = std::function<void(std::size_t done, std::size_t total)>;

inline SweepPoint measure_simulated_step(const SweepConfig& cfg, std::size_t i) {
  const ImageStack stack = simulate_stack(cfg.step_scenario(i), cfg.frames_per_step);
  return {cfg.frequency_at(i), row_noise(stack).average, cfg.frames_per_step};
}

inline SweepResult run_sweep(const SweepConfig& cfg, const SweepProgress& progress = {}) {
  cfg.validate();
  const std::size_t total = cfg.point_count();
  SweepResult result;
  result.config = cfg;

  if (cfg.capture) {
    // Hardware captures are inherently sequential.
    for (std::size_t i = 0; i < total; ++i) {
      const double f = cfg.frequency_at(i);
      try {
        const ImageStack stack =
            detail::capture_step(*cfg.capture, f, cfg.amplitude_vpp, cfg.frames_per_step);
        result.points.push_back({f, row_noise(stack).average, cfg.frames_per_step});
      } catch (const std::exception& e) {
        result.error = "step " + std::to_string(i) + " (" + format_shortest(f) + " Hz): " + e.what();
        return result;
      }
      if (progress) progress(i + 1, total);
    }
    return result;
  }

  std::vector<SweepPoint> points(total);
  const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), total));
  if (workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) {
      points[i] = measure_simulated_step(cfg, i);
      if (progress) progress(i + 1, total);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) {
          try {
            points[i] = measure_simulated_step(cfg, i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            return;
          }
          const std::size_t d = ++done;
          if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(d, total);
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  result.points = std::move(points);
  return result;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader = "frequency_hz,row_noise";

inline std::string format_csv(const SweepResult& result) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const SweepPoint& p : result.points) {
    out += format_shortest(p.frequency_hz);
    out += ',';
    out += format_fixed(p.row_noise_dn, 4);
    out += '\n';
  }
  return out;
}

inline SweepResult parse_csv(const std::string& text) {
  SweepResult result;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line != kCsvHeader) {
        throw ParseError("line 1: expected header '" + std::string(kCsvHeader) + "'");
      }
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 2 fields");
    }
    const auto f = parse_double(std::string_view(line).substr(0, comma));
    const auto v = parse_double(std::string_view(line).substr(comma + 1));
    if (!f || !std::isfinite(*f)) {
      throw ParseError("line " + std::to_string(line_no) + ": invalid frequency_hz");
    }
    if (!v || !std::isfinite(*v)) {
      throw ParseError("line " + std::to_string(line_no) + ": invalid row_noise");
    }
    if (!result.points.empty() && *f <= result.points.back().frequency_hz) {
      throw ParseError("line " + std::to_string(line_no) + ": frequencies must increase");
    }
    result.points.push_back({*f, *v, 0});
  }
  if (!have_header) throw ParseError("line 1: missing header");
  return result;
}

inline void write_csv(const SweepResult& result, const std::filesystem::path& path) {
  image_io::write_file(path, format_csv(result));
}

inline SweepResult read_csv(const std::filesystem::path& path) {
  try {
    return parse_csv(image_io::read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// JSON for sweep configs

inline void to_json(json& j, const SweepConfig& c) {
  j = json{{"start_hz", c.start_hz},
           {"end_hz", c.end_hz},
           {"step_hz", c.step_hz},
           {"amplitude_vpp", c.amplitude_vpp},
           {"frames_per_step", c.frames_per_step},
           {"scenario", c.scenario},
           {"seed", c.seed},
           {"workers", c.workers}};
  if (c.capture) {
    j["capture"] = json{{"command_template", c.capture->command_template},
                        {"image_dir", c.capture->image_dir.string()}};
  } else {
    j["capture"] = nullptr;
  }
}

inline void from_json(const json& j, SweepConfig& c) {
  detail::StrictObject o(j, "sweep");
  o.get("start_hz", c.start_hz);
  o.get("end_hz", c.end_hz);
  o.get("step_hz", c.step_hz);
  o.get("amplitude_vpp", c.amplitude_vpp);
  o.get("frames_per_step", c.frames_per_step);
  if (const json* s = o.child("scenario")) from_json(*s, c.scenario);
  o.get("seed", c.seed);
  o.get("workers", c.workers);
  if (const json* cap = o.child("capture"); cap && !cap->is_null()) {
    detail::StrictObject co(*cap, "sweep.capture");
    CaptureSource src;
    co.get("command_template", src.command_template);
    std::string dir;
    co.get("image_dir", dir);
    src.image_dir = dir;
    co.finish();
    c.capture = src;
  } else if (cap) {
    c.capture.reset();
  }
  o.finish();
}

}  // namespace rownoise

#endif  // ROWNOISE_SWEEP_HPP_
