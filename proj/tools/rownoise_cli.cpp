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

// rownoise: simulate, measure and characterize supply-induced row noise.
//
// Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or configuration
// error. Every run writes its fully resolved options to
// <out-dir>/<command>.config.json; passing that file back through --config
// reproduces the run.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rownoise/rownoise.hpp"

namespace fs = std::filesystem;

namespace rownoise::cli {
namespace {

// Input files that exist but cannot be used together.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Resolved options per command. Each struct is what the sidecar records.

struct SimulateOptions {
  SimScenario scenario;
  int frames = 3;
  std::string format = "pnm";  // pnm (PGM/PPM by channel count) or bmp
};

struct AnalyzeOptions {
  std::vector<std::string> inputs;
  bool per_frame = false;
  std::optional<std::string> csv;
};

struct SweepOptions {
  SweepConfig sweep;
  std::string csv = "RowNoiseOut.csv";
  std::optional<std::string> plot;
};

struct ReportOptions {
  std::string csv = "RowNoiseOut.csv";
  std::string threshold = "baseline_sigma";  // or absolute
  double k = 5.0;
  int window = 10;
  double value = 0.0;
  std::string json_out = "report.json";
};

struct DarkRefOptions {
  std::vector<std::string> inputs;
  int dark_columns = 1;
  double pedestal_dn = 16.0;
};

struct LowpassOptions {
  std::vector<std::string> inputs;
  int kernel_rows = 9;
  std::string kind = "trimmed_mean";
};

struct TuneOptions {
  double noise_freq_hz = 0.0;
  double fps_lo = 0.0;
  double fps_hi = 0.0;
  int frame_length_lo = 0;
  int frame_length_hi = 0;
  std::string mode = "max_separation";
};

struct FilterOptions {
  double frequency_hz = 0.0;
  double cutoff_hz = 0.0;
};

struct PredictOptions {
  double noise_freq_hz = 0.0;
  double fps = 30.0;
  int frame_length = 812;
};

void to_json(json& j, const SimulateOptions& o) {
  j = json{{"scenario", o.scenario}, {"frames", o.frames}, {"format", o.format}};
}
void from_json(const json& j, SimulateOptions& o) {
  detail::StrictObject s(j, "simulate");
  if (const json* c = s.child("scenario")) from_json(*c, o.scenario);
  s.get("frames", o.frames);
  s.get("format", o.format);
  s.finish();
}

void to_json(json& j, const AnalyzeOptions& o) {
  j = json{{"inputs", o.inputs},
           {"per_frame", o.per_frame},
           {"csv", o.csv ? json(*o.csv) : json(nullptr)}};
}
void from_json(const json& j, AnalyzeOptions& o) {
  detail::StrictObject s(j, "analyze");
  s.get("inputs", o.inputs);
  s.get("per_frame", o.per_frame);
  s.get_optional("csv", o.csv);
  s.finish();
}

void to_json(json& j, const SweepOptions& o) {
  j = json{{"sweep", o.sweep}, {"csv", o.csv}, {"plot", o.plot ? json(*o.plot) : json(nullptr)}};
}
void from_json(const json& j, SweepOptions& o) {
  detail::StrictObject s(j, "sweep");
  if (const json* c = s.child("sweep")) from_json(*c, o.sweep);
  s.get("csv", o.csv);
  s.get_optional("plot", o.plot);
  s.finish();
}

void to_json(json& j, const ReportOptions& o) {
  j = json{{"csv", o.csv},       {"threshold", o.threshold}, {"k", o.k},
           {"window", o.window}, {"value", o.value},         {"json_out", o.json_out}};
}
void from_json(const json& j, ReportOptions& o) {
  detail::StrictObject s(j, "report");
  s.get("csv", o.csv);
  s.get("threshold", o.threshold);
  s.get("k", o.k);
  s.get("window", o.window);
  s.get("value", o.value);
  s.get("json_out", o.json_out);
  s.finish();
}

void to_json(json& j, const DarkRefOptions& o) {
  j = json{{"inputs", o.inputs}, {"dark_columns", o.dark_columns}, {"pedestal_dn", o.pedestal_dn}};
}
void from_json(const json& j, DarkRefOptions& o) {
  detail::StrictObject s(j, "dark-ref");
  s.get("inputs", o.inputs);
  s.get("dark_columns", o.dark_columns);
  s.get("pedestal_dn", o.pedestal_dn);
  s.finish();
}

void to_json(json& j, const LowpassOptions& o) {
  j = json{{"inputs", o.inputs}, {"kernel_rows", o.kernel_rows}, {"kind", o.kind}};
}
void from_json(const json& j, LowpassOptions& o) {
  detail::StrictObject s(j, "lowpass");
  s.get("inputs", o.inputs);
  s.get("kernel_rows", o.kernel_rows);
  s.get("kind", o.kind);
  s.finish();
}

void to_json(json& j, const TuneOptions& o) {
  j = json{{"noise_freq_hz", o.noise_freq_hz},     {"fps_lo", o.fps_lo},
           {"fps_hi", o.fps_hi},                   {"frame_length_lo", o.frame_length_lo},
           {"frame_length_hi", o.frame_length_hi}, {"mode", o.mode}};
}
void from_json(const json& j, TuneOptions& o) {
  detail::StrictObject s(j, "tune");
  s.get("noise_freq_hz", o.noise_freq_hz);
  s.get("fps_lo", o.fps_lo);
  s.get("fps_hi", o.fps_hi);
  s.get("frame_length_lo", o.frame_length_lo);
  s.get("frame_length_hi", o.frame_length_hi);
  s.get("mode", o.mode);
  s.finish();
}

void to_json(json& j, const FilterOptions& o) {
  j = json{{"frequency_hz", o.frequency_hz}, {"cutoff_hz", o.cutoff_hz}};
}
void from_json(const json& j, FilterOptions& o) {
  detail::StrictObject s(j, "filter");
  s.get("frequency_hz", o.frequency_hz);
  s.get("cutoff_hz", o.cutoff_hz);
  s.finish();
}

void to_json(json& j, const PredictOptions& o) {
  j = json{{"noise_freq_hz", o.noise_freq_hz}, {"fps", o.fps}, {"frame_length", o.frame_length}};
}
void from_json(const json& j, PredictOptions& o) {
  detail::StrictObject s(j, "predict");
  s.get("noise_freq_hz", o.noise_freq_hz);
  s.get("fps", o.fps);
  s.get("frame_length", o.frame_length);
  s.finish();
}

// ---------------------------------------------------------------------------
// Shared plumbing

struct Common {
  std::optional<std::string> config;
  std::string out_dir = ".";
  bool verbose = false;
};

template <typename T>
void set_if(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

// Loads --config into opts. The document is either a sidecar
// {"command": ..., "options": {...}} or a bare options object.
template <typename Options>
void load_config(const Common& common, const std::string& command, Options& opts) {
  if (!common.config) return;
  json doc;
  try {
    doc = json::parse(image_io::read_file(*common.config));
  } catch (const json::parse_error& e) {
    throw ConfigError(*common.config + ": invalid JSON: " + e.what());
  }
  if (doc.is_object() && doc.contains("options")) {
    if (doc.contains("command") && doc.at("command") != command) {
      throw ConfigError(*common.config + ": written by '" + doc.at("command").dump() +
                        "', not '" + command + "'");
    }
    doc = doc.at("options");
  }
  from_json(doc, opts);
}

fs::path out_path(const Common& common, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : fs::path(common.out_dir) / path;
}

template <typename Options>
void write_sidecar(const Common& common, const std::string& command, const Options& opts) {
  std::error_code ec;
  fs::create_directories(common.out_dir, ec);
  const json doc{{"command", command}, {"version", "0.1.0"}, {"options", opts}};
  image_io::write_file(out_path(common, command + ".config.json"), doc.dump(2) + "\n");
}

// Expands directories into their images (lexicographic order), skipping
// dark-reference companions.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw ConfigError("no input images given");
  std::vector<fs::path> out;
  for (const std::string& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const std::string stem = e.path().stem().string();
        const bool dark = stem.size() >= 5 && stem.compare(stem.size() - 5, 5, "_dark") == 0;
        if (e.is_regular_file() && image_io::has_image_extension(e.path()) && !dark) {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) throw InputError(p.string() + ": no images found");
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

ImageStack read_stack(const std::vector<fs::path>& paths) {
  ImageStack stack;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    Frame f = image_io::read_image(paths[i]);
    if (!stack.empty() && !f.pixels.same_shape(stack.front().pixels)) {
      throw InputError(paths[i].string() + ": " + std::to_string(f.width()) + "x" +
                       std::to_string(f.rows()) + "x" + std::to_string(f.channels()) +
                       " does not match " + paths.front().string() + " (" +
                       std::to_string(stack.front().width()) + "x" +
                       std::to_string(stack.front().rows()) + "x" +
                       std::to_string(stack.front().channels()) + ")");
    }
    f.index = static_cast<int>(i);
    stack.push_back(std::move(f));
  }
  return stack;
}

// Writes a corrected frame next to nothing it came from.
void write_output_frame(const Common& common, const fs::path& input, const Frame& frame) {
  std::error_code ec;
  fs::create_directories(common.out_dir, ec);
  const fs::path out = fs::path(common.out_dir) / input.filename();
  if (fs::exists(out) && fs::equivalent(out, input)) {
    throw ConfigError("refusing to overwrite input " + input.string() + "; choose another --out-dir");
  }
  const std::string ext = input.extension().string();
  if (ext == ".bmp" || ext == ".BMP") {
    image_io::write_bmp(frame, out);
  } else {
    image_io::write_image(frame, out, image_io::format_for_channels(frame.channels()));
  }
}

std::string band_text(const physics::BandHeight& h) {
  return h ? format_shortest(*h) + " rows" : std::string("uniform (no bands)");
}

// Scenario flags shared by simulate and sweep.
struct ScenarioFlags {
  std::optional<int> width, rows, ob_rows, blanking, channels, dark_cols;
  std::optional<double> fps, pedestal, dn_per_volt, phase, coupling, rc_cutoff;
  std::optional<double> read_noise, dark_signal, flicker_scale;
  std::optional<std::string> phase_mode;
  std::optional<std::uint64_t> seed;
  bool temporal_off = false;
  bool spatial_off = false;
  bool flicker = false;
  bool no_cds = false;

  void add(CLI::App* app) {
    app->add_option("--width", width, "Active columns")->check(CLI::PositiveNumber);
    app->add_option("--rows", rows, "Active rows")->check(CLI::PositiveNumber);
    app->add_option("--ob-rows", ob_rows, "Optical black rows")->check(CLI::NonNegativeNumber);
    app->add_option("--blanking", blanking, "Blanking rows per frame")->check(CLI::NonNegativeNumber);
    app->add_option("--fps", fps, "Frame rate")->check(CLI::PositiveNumber);
    app->add_option("--channels", channels, "1 or 3")->check(CLI::IsMember({1, 3}));
    app->add_option("--dark-cols", dark_cols, "Dark reference columns per row")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--pedestal", pedestal, "Black level in DN");
    app->add_option("--dn-per-volt", dn_per_volt, "ADC gain");
    app->add_option("--phase", phase, "Supply noise phase in radians");
    app->add_option("--phase-mode", phase_mode, "continuous or random_per_frame")
        ->check(CLI::IsMember({"continuous", "random_per_frame"}));
    app->add_option("--coupling", coupling, "Bias shift per volt of supply noise");
    app->add_option("--rc-cutoff", rc_cutoff, "Supply RC filter corner in Hz");
    app->add_option("--read-noise", read_noise, "Gaussian read noise in DN");
    app->add_option("--dark-signal", dark_signal, "Mean dark electrons per pixel");
    app->add_option("--flicker-scale", flicker_scale, "1/f noise scale in DN");
    app->add_option("--seed", seed, "Random seed");
    app->add_flag("--temporal-off", temporal_off, "Disable all temporal noise");
    app->add_flag("--spatial-off", spatial_off, "Disable fixed-pattern noise");
    app->add_flag("--flicker", flicker, "Enable 1/f noise");
    app->add_flag("--no-cds", no_cds, "Disable correlated double sampling");
  }

  void apply(SimScenario& s) const {
    set_if(width, s.sensor.width);
    set_if(rows, s.sensor.active_rows);
    set_if(ob_rows, s.sensor.optical_black_rows);
    set_if(blanking, s.sensor.blanking_rows);
    set_if(fps, s.sensor.fps);
    set_if(channels, s.sensor.channels);
    set_if(dark_cols, s.sensor.dark_columns);
    set_if(pedestal, s.sensor.pedestal_dn);
    set_if(dn_per_volt, s.sensor.dn_per_volt);
    set_if(phase, s.supply.phase_rad);
    if (phase_mode) s.supply.phase_mode = phase_mode_from_string(*phase_mode);
    set_if(coupling, s.supply.coupling_gain);
    if (rc_cutoff) s.supply.rc_cutoff_hz = *rc_cutoff;
    set_if(seed, s.seed);
    if (temporal_off) s.temporal = TemporalNoiseConfig::none();
    if (spatial_off) s.spatial = SpatialNoiseConfig::none();
    set_if(read_noise, s.temporal.read_noise_dn);
    set_if(dark_signal, s.temporal.dark_signal_e);
    set_if(flicker_scale, s.temporal.flicker_scale_dn);
    if (flicker) s.temporal.flicker_enabled = true;
    if (no_cds) s.temporal.cds_enabled = false;
  }
};

// ---------------------------------------------------------------------------
// Commands

struct SimulateFlags {
  ScenarioFlags scenario;
  std::optional<double> noise_freq, noise_amp;
  std::optional<int> frames;
  std::optional<std::string> format;
};

int run_simulate(const Common& common, const SimulateFlags& flags) {
  SimulateOptions opts;
  load_config(common, "simulate", opts);
  flags.scenario.apply(opts.scenario);
  set_if(flags.noise_freq, opts.scenario.supply.frequency_hz);
  set_if(flags.noise_amp, opts.scenario.supply.amplitude_vpp);
  set_if(flags.frames, opts.frames);
  set_if(flags.format, opts.format);
  if (opts.frames < 1) throw ConfigError("frames must be >= 1");
  if (opts.format != "pnm" && opts.format != "bmp") throw ConfigError("format must be pnm or bmp");
  if (opts.format == "bmp" && opts.scenario.sensor.channels != 3) {
    throw ConfigError("bmp output needs 3 channels");
  }
  opts.scenario.validate();
  write_sidecar(common, "simulate", opts);

  const ImageStack stack = simulate_stack(opts.scenario, opts.frames);
  const auto format = image_io::format_for_channels(opts.scenario.sensor.channels);
  const std::string ext = opts.format == "bmp" ? ".bmp" : image_io::extension(format);
  for (const Frame& f : stack) {
    const std::string name = "im" + std::to_string(f.index + 1);
    const fs::path path = out_path(common, name + ext);
    if (opts.format == "bmp") {
      image_io::write_bmp(f, path);
    } else {
      image_io::write_image(f, path, format);
    }
    if (!f.dark_reference.empty()) {
      Frame dark;
      dark.pixels = f.dark_reference;
      const fs::path dpath = out_path(common, name + "_dark" + ext);
      if (opts.format == "bmp") {
        image_io::write_bmp(dark, dpath);
      } else {
        image_io::write_image(dark, dpath, format);
      }
    }
    if (common.verbose) std::cerr << "wrote " << path.string() << "\n";
  }
  return 0;
}

struct AnalyzeFlags {
  std::vector<std::string> inputs;
  bool per_frame = false;
  std::optional<std::string> csv;
};

int run_analyze(const Common& common, const AnalyzeFlags& flags) {
  AnalyzeOptions opts;
  load_config(common, "analyze", opts);
  if (!flags.inputs.empty()) opts.inputs = flags.inputs;
  if (flags.per_frame) opts.per_frame = true;
  if (flags.csv) opts.csv = flags.csv;
  const std::vector<fs::path> paths = expand_inputs(opts.inputs);
  write_sidecar(common, "analyze", opts);

  const ImageStack stack = read_stack(paths);
  const RowNoiseResult result = row_noise(stack);
  if (opts.per_frame) {
    for (std::size_t i = 0; i < paths.size(); ++i) {
      std::cout << paths[i].string() << " " << format_fixed(result.per_frame[i], 4) << "\n";
    }
    std::cout << "average " << format_fixed(result.average, 4) << "\n";
  } else {
    std::cout << format_fixed(result.average, 4) << "\n";
  }
  if (opts.csv) {
    std::string text = "file,row_noise\n";
    for (std::size_t i = 0; i < paths.size(); ++i) {
      text += paths[i].string() + "," + format_fixed(result.per_frame[i], 4) + "\n";
    }
    text += "average," + format_fixed(result.average, 4) + "\n";
    image_io::write_file(out_path(common, *opts.csv), text);
  }
  return 0;
}

struct SweepFlags {
  ScenarioFlags scenario;
  std::optional<double> start, end, step, amp;
  std::optional<int> frames_per_step, workers;
  std::optional<std::string> capture_cmd, image_dir, csv, plot;
};

int run_sweep_cmd(const Common& common, const SweepFlags& flags) {
  SweepOptions opts;
  load_config(common, "sweep", opts);
  SweepConfig& c = opts.sweep;
  flags.scenario.apply(c.scenario);
  set_if(flags.scenario.seed, c.seed);
  set_if(flags.start, c.start_hz);
  set_if(flags.end, c.end_hz);
  set_if(flags.step, c.step_hz);
  set_if(flags.amp, c.amplitude_vpp);
  set_if(flags.frames_per_step, c.frames_per_step);
  set_if(flags.workers, c.workers);
  if (flags.capture_cmd || flags.image_dir) {
    CaptureSource src = c.capture.value_or(CaptureSource{});
    if (flags.capture_cmd) src.command_template = *flags.capture_cmd;
    if (flags.image_dir) src.image_dir = *flags.image_dir;
    if (src.image_dir.empty()) src.image_dir = ".";
    c.capture = src;
  }
  set_if(flags.csv, opts.csv);
  if (flags.plot) opts.plot = *flags.plot;
  c.validate();
  write_sidecar(common, "sweep", opts);

  SweepProgress progress;
  if (common.verbose) {
    progress = [](std::size_t done, std::size_t total) {
      std::cerr << "\rstep " << done << "/" << total << std::flush;
      if (done == total) std::cerr << "\n";
    };
  }
  const SweepResult result = run_sweep(c, progress);
  const fs::path csv = out_path(common, opts.csv);
  write_csv(result, csv);
  if (opts.plot && !result.points.empty()) emit_plot_data(result, out_path(common, *opts.plot));
  if (!result.complete()) {
    std::cerr << "rownoise: sweep stopped: " << *result.error << "\n"
              << "rownoise: " << result.points.size() << " completed point(s) written to "
              << csv.string() << "\n";
    return 1;
  }
  std::cout << "wrote " << result.points.size() << " point(s) to " << csv.string() << "\n";
  return 0;
}

struct ReportFlags {
  std::optional<std::string> csv, threshold, json_out;
  std::optional<double> k, value;
  std::optional<int> window;
};

int run_report(const Common& common, const ReportFlags& flags) {
  ReportOptions opts;
  load_config(common, "report", opts);
  set_if(flags.csv, opts.csv);
  set_if(flags.threshold, opts.threshold);
  set_if(flags.k, opts.k);
  set_if(flags.window, opts.window);
  set_if(flags.json_out, opts.json_out);
  if (flags.value) {
    opts.value = *flags.value;
    if (!flags.threshold) opts.threshold = "absolute";
  }
  ThresholdMode mode;
  if (opts.threshold == "baseline_sigma") {
    mode = BaselineSigma{opts.k, opts.window};
  } else if (opts.threshold == "absolute") {
    mode = AbsoluteThreshold{opts.value};
  } else {
    throw ConfigError("threshold must be baseline_sigma or absolute");
  }
  write_sidecar(common, "report", opts);

  const SweepResult result = read_csv(opts.csv);
  if (result.points.empty()) throw InputError(opts.csv + ": no sweep points");
  const CharacterizationReport rep = analyze_report(result, mode);
  std::cout << format_report_text(rep);
  image_io::write_file(out_path(common, opts.json_out), json(rep).dump(2) + "\n");
  return 0;
}

struct DarkRefFlags {
  std::vector<std::string> inputs;
  std::optional<int> m;
  std::optional<double> pedestal;
};

int run_dark_ref(const Common& common, const DarkRefFlags& flags) {
  DarkRefOptions opts;
  load_config(common, "mitigate-dark-ref", opts);
  if (!flags.inputs.empty()) opts.inputs = flags.inputs;
  set_if(flags.m, opts.dark_columns);
  set_if(flags.pedestal, opts.pedestal_dn);
  if (opts.dark_columns < 1) throw DomainError("dark columns must be >= 1");
  const std::vector<fs::path> paths = expand_inputs(opts.inputs);
  write_sidecar(common, "mitigate-dark-ref", opts);

  for (const fs::path& p : paths) {
    const Frame f = image_io::read_image(p);
    const fs::path dark_path = p.parent_path() / (p.stem().string() + "_dark" + p.extension().string());
    if (!fs::exists(dark_path)) throw InputError(p.string() + ": missing dark reference " + dark_path.string());
    const Frame dark = image_io::read_image(dark_path);
    const Frame out = mitigation::dark_reference_correct(f, opts.dark_columns, dark.pixels, opts.pedestal_dn);
    write_output_frame(common, p, out);
    std::cout << p.filename().string() << " " << format_fixed(row_noise_single(f), 4) << " -> "
              << format_fixed(row_noise_single(out), 4) << "\n";
  }
  return 0;
}

struct LowpassFlags {
  std::vector<std::string> inputs;
  std::optional<int> kernel;
  std::optional<std::string> kind;
};

int run_lowpass(const Common& common, const LowpassFlags& flags) {
  LowpassOptions opts;
  load_config(common, "mitigate-lowpass", opts);
  if (!flags.inputs.empty()) opts.inputs = flags.inputs;
  set_if(flags.kernel, opts.kernel_rows);
  set_if(flags.kind, opts.kind);
  mitigation::LowpassKind kind;
  if (opts.kind == "trimmed_mean") {
    kind = mitigation::LowpassKind::kTrimmedMean;
  } else if (opts.kind == "median") {
    kind = mitigation::LowpassKind::kMedian;
  } else if (opts.kind == "moving_average") {
    kind = mitigation::LowpassKind::kMovingAverage;
  } else {
    throw ConfigError("kind must be trimmed_mean, median or moving_average");
  }
  const std::vector<fs::path> paths = expand_inputs(opts.inputs);
  write_sidecar(common, "mitigate-lowpass", opts);

  for (const fs::path& p : paths) {
    const Frame f = image_io::read_image(p);
    const Frame out = mitigation::lowpass_offset_suppress(f, opts.kernel_rows, kind);
    write_output_frame(common, p, out);
    std::cout << p.filename().string() << " " << format_fixed(row_noise_single(f), 4) << " -> "
              << format_fixed(row_noise_single(out), 4) << "\n";
  }
  return 0;
}

struct TuneFlags {
  std::optional<double> noise_freq, fps_lo, fps_hi;
  std::optional<int> len_lo, len_hi;
  std::optional<std::string> mode;
};

int run_tune(const Common& common, const TuneFlags& flags) {
  TuneOptions opts;
  load_config(common, "mitigate-tune", opts);
  set_if(flags.noise_freq, opts.noise_freq_hz);
  set_if(flags.fps_lo, opts.fps_lo);
  set_if(flags.fps_hi, opts.fps_hi);
  set_if(flags.len_lo, opts.frame_length_lo);
  set_if(flags.len_hi, opts.frame_length_hi);
  set_if(flags.mode, opts.mode);
  mitigation::TuningMode mode;
  if (opts.mode == "sync") {
    mode = mitigation::TuningMode::kSync;
  } else if (opts.mode == "max_separation") {
    mode = mitigation::TuningMode::kMaxSeparation;
  } else {
    throw ConfigError("mode must be sync or max_separation");
  }
  write_sidecar(common, "mitigate-tune", opts);
  const auto t = mitigation::recommend_tuning(opts.noise_freq_hz, {opts.fps_lo, opts.fps_hi},
                                              {opts.frame_length_lo, opts.frame_length_hi}, mode);
  std::cout << "fps " << format_shortest(t.recommended_fps) << "\n"
            << "frame length " << t.recommended_frame_length << " rows\n"
            << "line frequency " << format_shortest(t.line_frequency_hz) << " Hz\n"
            << "alias frequency " << format_shortest(t.resulting_alias_hz) << " Hz\n"
            << "band height " << band_text(t.predicted_band_height_rows) << "\n";
  return 0;
}

int run_filter(const Common& common, const std::optional<double>& freq,
               const std::optional<double>& cutoff) {
  FilterOptions opts;
  load_config(common, "mitigate-filter", opts);
  set_if(freq, opts.frequency_hz);
  set_if(cutoff, opts.cutoff_hz);
  write_sidecar(common, "mitigate-filter", opts);
  std::cout << "attenuation " << format_fixed(mitigation::predict_filter_effect(opts.frequency_hz, opts.cutoff_hz), 4)
            << "\n";
  return 0;
}

int run_predict(const Common& common, const std::optional<double>& noise_freq,
                const std::optional<double>& fps, const std::optional<int>& frame_length) {
  PredictOptions opts;
  load_config(common, "predict", opts);
  set_if(noise_freq, opts.noise_freq_hz);
  set_if(fps, opts.fps);
  set_if(frame_length, opts.frame_length);
  const double f_line = physics::line_frequency(opts.fps, opts.frame_length);
  if (!(opts.noise_freq_hz >= 0.0)) throw DomainError("noise frequency must be >= 0");
  write_sidecar(common, "predict", opts);
  const auto a = physics::alias_and_band_height(opts.noise_freq_hz, f_line);
  std::cout << "line frequency " << format_shortest(f_line) << " Hz\n"
            << "alias frequency " << format_shortest(a.alias_hz) << " Hz\n"
            << "band height " << band_text(a.band_height_rows) << "\n";
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Simulate, measure and characterize supply-induced CMOS row noise"};
  app.set_version_flag("--version", "rownoise 0.1.0");
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config, "JSON options file (a previous run's sidecar works)");
  app.add_option("--out-dir", common.out_dir, "Directory for outputs and the sidecar");
  app.add_flag("-v,--verbose", common.verbose, "Progress on stderr");
  // Accept the global options after the subcommand name as well.
  app.fallthrough();

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Write simulated dark frames im1..imN");
  sim.scenario.add(simulate);
  simulate->add_option("--noise-freq", sim.noise_freq, "Supply noise frequency in Hz")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--noise-amp", sim.noise_amp, "Supply noise amplitude in Vpp")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--frames", sim.frames, "Number of frames")->check(CLI::PositiveNumber);
  simulate->add_option("--format", sim.format, "pnm or bmp")->check(CLI::IsMember({"pnm", "bmp"}));

  AnalyzeFlags an;
  auto* analyze = app.add_subcommand("analyze", "Row noise of an image stack");
  analyze->add_option("inputs", an.inputs, "Image files or directories");
  analyze->add_flag("--per-frame", an.per_frame, "Print each frame's value");
  analyze->add_option("--csv", an.csv, "Also write per-frame values as CSV");

  SweepFlags sw;
  auto* sweep = app.add_subcommand("sweep", "Row noise against supply noise frequency");
  sw.scenario.add(sweep);
  sweep->add_option("--start", sw.start, "First frequency in Hz");
  sweep->add_option("--end", sw.end, "Last frequency in Hz");
  sweep->add_option("--step", sw.step, "Frequency step in Hz");
  sweep->add_option("--amp", sw.amp, "Supply noise amplitude in Vpp");
  sweep->add_option("--frames-per-step", sw.frames_per_step)->check(CLI::PositiveNumber);
  sweep->add_option("--workers", sw.workers, "Parallel simulation workers")->check(CLI::PositiveNumber);
  sweep->add_option("--capture-cmd", sw.capture_cmd, "Capture command with {freq} and {amp}");
  sweep->add_option("--image-dir", sw.image_dir, "Where the capture command writes images");
  sweep->add_option("--csv", sw.csv, "Output CSV (default RowNoiseOut.csv)");
  sweep->add_option("--plot", sw.plot, "Also write an SVG plot and .dat table");

  ReportFlags rf;
  auto* report = app.add_subcommand("report", "Characterization report from a sweep CSV");
  report->add_option("--csv", rf.csv, "Sweep CSV");
  report->add_option("--threshold", rf.threshold, "baseline_sigma or absolute")
      ->check(CLI::IsMember({"baseline_sigma", "absolute"}));
  report->add_option("--k", rf.k, "Baseline sigma multiplier");
  report->add_option("--window", rf.window, "Baseline points");
  report->add_option("--value", rf.value, "Absolute threshold in DN");
  report->add_option("--json", rf.json_out, "Report JSON path (default report.json)");

  auto* mitigate = app.add_subcommand("mitigate", "Row-noise mitigation tools");
  mitigate->require_subcommand(1);
  DarkRefFlags dr;
  auto* dark_ref = mitigate->add_subcommand("dark-ref", "Subtract per-row dark reference offsets");
  dark_ref->add_option("inputs", dr.inputs, "Images with <name>_dark companions");
  dark_ref->add_option("-m,--dark-cols", dr.m, "Dark pixels averaged per row");
  dark_ref->add_option("--pedestal", dr.pedestal, "Black level in DN");
  LowpassFlags lp;
  auto* lowpass = mitigate->add_subcommand("lowpass", "Suppress row offsets against a vertical low-pass");
  lowpass->add_option("inputs", lp.inputs, "Image files or directories");
  lowpass->add_option("--kernel", lp.kernel, "Odd kernel height in rows");
  lowpass->add_option("--kind", lp.kind, "trimmed_mean, median or moving_average")
      ->check(CLI::IsMember({"trimmed_mean", "median", "moving_average"}));
  TuneFlags tf;
  auto* tune = mitigate->add_subcommand("tune", "Pick fps and frame length against a noise frequency");
  tune->add_option("--noise-freq", tf.noise_freq, "Noise frequency in Hz");
  tune->add_option("--fps-min", tf.fps_lo);
  tune->add_option("--fps-max", tf.fps_hi);
  tune->add_option("--frame-length-min", tf.len_lo);
  tune->add_option("--frame-length-max", tf.len_hi);
  tune->add_option("--mode", tf.mode, "sync or max_separation")
      ->check(CLI::IsMember({"sync", "max_separation"}));
  std::optional<double> filter_freq, filter_cutoff;
  auto* filter = mitigate->add_subcommand("filter", "First-order RC attenuation at a frequency");
  filter->add_option("--freq", filter_freq, "Noise frequency in Hz");
  filter->add_option("--cutoff", filter_cutoff, "Filter corner in Hz");

  std::optional<double> p_freq, p_fps;
  std::optional<int> p_len;
  auto* predict = app.add_subcommand("predict", "Alias frequency and band height");
  predict->add_option("--noise-freq", p_freq, "Noise frequency in Hz");
  predict->add_option("--fps", p_fps, "Frame rate");
  predict->add_option("--frame-length", p_len, "Rows per frame including blanking");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*simulate) return run_simulate(common, sim);
  if (*analyze) return run_analyze(common, an);
  if (*sweep) return run_sweep_cmd(common, sw);
  if (*report) return run_report(common, rf);
  if (*predict) return run_predict(common, p_freq, p_fps, p_len);
  if (*dark_ref) return run_dark_ref(common, dr);
  if (*lowpass) return run_lowpass(common, lp);
  if (*tune) return run_tune(common, tf);
  if (*filter) return run_filter(common, filter_freq, filter_cutoff);
  return 2;
}

}  // namespace
}  // namespace rownoise::cli

int main(int argc, char** argv) {
  try {
    return rownoise::cli::run(argc, argv);
  } catch (const std::invalid_argument& e) {
    // ConfigError and DomainError.
    std::cerr << "rownoise: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rownoise: " << e.what() << "\n";
    return 1;
  }
}
