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


// End-to-end checks of the rownoise command-line tool.

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "rownoise/rownoise.hpp"

namespace rownoise {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rownoise_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunResult run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(ROWNOISE_CLI_PATH) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = image_io::read_file(out);
    r.err = image_io::read_file(err);
    return r;
  }

  std::string d(const std::string& sub = "") const { return (dir_ / sub).string(); }

  fs::path dir_;
};

constexpr const char* kSmall = " --width 64 --rows 48 ";

TEST_F(CliTest, SimulateWritesFramesAndSidecar) {
  const RunResult r = run("simulate --noise-freq 126000 --noise-amp 1.0 --frames 3 --out-dir " + d("a"));
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"im1.pgm", "im2.pgm", "im3.pgm", "simulate.config.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "a" / name)) << name;
  }
  EXPECT_FALSE(fs::exists(dir_ / "a" / "im4.pgm"));
  const json sidecar = json::parse(image_io::read_file(dir_ / "a" / "simulate.config.json"));
  EXPECT_EQ(sidecar.at("command"), "simulate");
  EXPECT_EQ(sidecar.at("options").at("scenario").at("supply").at("frequency_hz"), 126000.0);
  EXPECT_EQ(sidecar.at("options").at("scenario").at("seed"), 1);
  const Frame f = image_io::read_image(dir_ / "a" / "im1.pgm");
  EXPECT_EQ(f.width(), 1280);
  EXPECT_EQ(f.rows(), 800);
}

TEST_F(CliTest, SimulateIsDeterministicAndSidecarReproduces) {
  ASSERT_EQ(run(std::string("simulate") + kSmall + "--noise-freq 5000 --seed 9 --frames 2 --out-dir " + d("a")).code, 0);
  ASSERT_EQ(run(std::string("simulate") + kSmall + "--noise-freq 5000 --seed 9 --frames 2 --out-dir " + d("b")).code, 0);
  ASSERT_EQ(run("--config " + d("a/simulate.config.json") + " simulate --out-dir " + d("c")).code, 0);
  for (const char* name : {"im1.pgm", "im2.pgm"}) {
    const std::string a = image_io::read_file(dir_ / "a" / name);
    EXPECT_EQ(a, image_io::read_file(dir_ / "b" / name));
    EXPECT_EQ(a, image_io::read_file(dir_ / "c" / name));
  }
  ASSERT_EQ(run(std::string("simulate") + kSmall + "--noise-freq 5000 --seed 10 --frames 1 --out-dir " + d("e")).code, 0);
  EXPECT_NE(image_io::read_file(dir_ / "a" / "im1.pgm"), image_io::read_file(dir_ / "e" / "im1.pgm"));
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run("simulate --frames 0 --out-dir " + d()).code, 2);
  EXPECT_EQ(run("simulate --channels 2 --out-dir " + d()).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("simulate --width=-3 --out-dir " + d()).code, 2);
  image_io::write_file(dir_ / "bad.json", "{\"frames\": 0}");
  EXPECT_EQ(run("--config " + d("bad.json") + " simulate --out-dir " + d()).code, 2);
  image_io::write_file(dir_ / "typo.json", "{\"frame\": 2}");
  EXPECT_EQ(run("--config " + d("typo.json") + " simulate --out-dir " + d()).code, 2);
  image_io::write_file(dir_ / "broken.json", "{");
  EXPECT_EQ(run("--config " + d("broken.json") + " simulate --out-dir " + d()).code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(CliTest, AnalyzeConstantFramesPrintsZero) {
  Frame f;
  f.pixels = PixelGrid(10, 10, 1, 42);
  for (const char* name : {"im1.pgm", "im2.pgm", "im3.pgm"}) {
    image_io::write_image(f, dir_ / name, image_io::ImageFormat::kPgm);
  }
  const RunResult r = run("analyze " + d("im1.pgm") + " " + d("im2.pgm") + " " + d("im3.pgm") +
                          " --out-dir " + d("o"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0.0000\n");
}

TEST_F(CliTest, AnalyzeDirectoryIsLexicographic) {
  fs::create_directories(dir_ / "in");
  for (int i : {2, 1, 10}) {
    Frame f;
    f.pixels = PixelGrid(4, 4, 1, 0);
    f.pixels.at(0, 0, 0) = static_cast<std::uint8_t>(4 * i);  // row noise depends on i
    image_io::write_image(f, dir_ / "in" / ("im" + std::to_string(i) + ".pgm"), image_io::ImageFormat::kPgm);
  }
  const RunResult r = run("analyze --per-frame " + d("in") + " --out-dir " + d("o") + " --csv frames.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto p1 = r.out.find("im1.pgm"), p10 = r.out.find("im10.pgm"), p2 = r.out.find("im2.pgm");
  ASSERT_NE(p10, std::string::npos);
  EXPECT_LT(p1, p10);
  EXPECT_LT(p10, p2);
  EXPECT_NE(r.out.find("average "), std::string::npos);
  EXPECT_EQ(image_io::read_file(dir_ / "o" / "frames.csv").rfind("file,row_noise\n", 0), 0u);
}

TEST_F(CliTest, AnalyzeMixedDimensionsNamesTheFile) {
  fs::create_directories(dir_ / "in");
  Frame a, b;
  a.pixels = PixelGrid(4, 4, 1, 1);
  b.pixels = PixelGrid(5, 4, 1, 1);
  image_io::write_image(a, dir_ / "in" / "im1.pgm", image_io::ImageFormat::kPgm);
  image_io::write_image(b, dir_ / "in" / "im2.pgm", image_io::ImageFormat::kPgm);
  const RunResult r = run("analyze " + d("in") + " --out-dir " + d("o"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("im2.pgm"), std::string::npos);
  const RunResult missing = run("analyze " + d("nope.pgm") + " --out-dir " + d("o"));
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("nope.pgm"), std::string::npos);
}

TEST_F(CliTest, SweepWritesHundredPointCsv) {
  const RunResult r = run(std::string("sweep") + " --width 16 --rows 40 --frames-per-step 1 --start 50 --end 100000 --step 1000 --workers 2 --plot curve.svg --out-dir " + d());
  ASSERT_EQ(r.code, 0) << r.err;
  const SweepResult s = read_csv(dir_ / "RowNoiseOut.csv");
  EXPECT_EQ(s.points.size(), 100u);
  EXPECT_TRUE(fs::exists(dir_ / "curve.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "curve.dat"));
  const json sidecar = json::parse(image_io::read_file(dir_ / "sweep.config.json"));
  EXPECT_EQ(sidecar.at("options").at("sweep").at("end_hz"), 100000.0);

  // Replaying the sidecar gives the same bytes.
  ASSERT_EQ(run("--config " + d("sweep.config.json") + " sweep --out-dir " + d("replay")).code, 0);
  EXPECT_EQ(image_io::read_file(dir_ / "RowNoiseOut.csv"), image_io::read_file(dir_ / "replay" / "RowNoiseOut.csv"));
}

TEST_F(CliTest, SweepCaptureFailureExitsOneWithPartialCsv) {
  const RunResult r = run("sweep --start 1000 --end 3000 --step 1000 --capture-cmd 'false {freq} {amp}' --image-dir " + d() + " --out-dir " + d());
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(image_io::read_file(dir_ / "RowNoiseOut.csv"), "frequency_hz,row_noise\n");
  EXPECT_EQ(run("sweep --capture-cmd 'grab {freq}' --out-dir " + d()).code, 2);
}

TEST_F(CliTest, ReportOnAllZeroCsv) {
  std::string csv = "frequency_hz,row_noise\n";
  for (int i = 0; i < 20; ++i) csv += std::to_string(50 + 1000 * i) + ",0.0000\n";
  image_io::write_file(dir_ / "out.csv", csv);
  const RunResult r = run("report --csv " + d("out.csv") + " --out-dir " + d());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("no areas of concern"), std::string::npos);
  const json j = json::parse(image_io::read_file(dir_ / "report.json"));
  EXPECT_TRUE(j.at("Row Noise Start").is_null());
  EXPECT_EQ(run("report --csv " + d("missing.csv") + " --out-dir " + d()).code, 1);
  image_io::write_file(dir_ / "bad.csv", "frequency_hz,row_noise\n1,x\n");
  const RunResult bad = run("report --csv " + d("bad.csv") + " --out-dir " + d());
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, ReportAbsoluteThreshold) {
  image_io::write_file(dir_ / "c.csv", "frequency_hz,row_noise\n1000,0.1\n2000,5\n3000,6\n4000,0.2\n");
  const RunResult r = run("report --csv " + d("c.csv") + " --value 1 --out-dir " + d());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("2 kHz - 3 kHz"), std::string::npos);
  EXPECT_NE(r.out.find("Peak Row Noise      3 kHz"), std::string::npos);
}

TEST_F(CliTest, PredictMidpoint) {
  const RunResult r = run("predict --noise-freq 36000 --fps 30 --frame-length 800 --out-dir " + d());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("alias frequency 12000 Hz"), std::string::npos);
  EXPECT_NE(r.out.find("band height 1 rows"), std::string::npos);
  const RunResult h = run("predict --noise-freq 48000 --fps 30 --frame-length 800 --out-dir " + d());
  EXPECT_NE(h.out.find("uniform"), std::string::npos);
  EXPECT_EQ(run("predict --noise-freq 100 --fps 0 --frame-length 800 --out-dir " + d()).code, 2);
}

TEST_F(CliTest, MitigateDarkRefFlattensSupplyBands) {
  ASSERT_EQ(run(std::string("simulate") + kSmall + "--dark-cols 2 --temporal-off --spatial-off --noise-freq 7777 --noise-amp 1 --frames 2 --out-dir " + d("raw")).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "raw" / "im1_dark.pgm"));
  const RunResult r = run("mitigate dark-ref " + d("raw") + " -m 2 --pedestal 16 --out-dir " + d("fixed"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(row_noise_single(image_io::read_image(dir_ / "fixed" / "im1.pgm")), 0.0);
  EXPECT_EQ(run("mitigate dark-ref " + d("raw") + " -m 0 --out-dir " + d("fixed")).code, 2);
  EXPECT_EQ(run("mitigate dark-ref " + d("raw") + " -m 2 --out-dir " + d("raw")).code, 2);
}

TEST_F(CliTest, MitigateLowpassTuneFilter) {
  ASSERT_EQ(run(std::string("simulate") + kSmall + "--noise-freq 30000 --frames 1 --out-dir " + d("raw")).code, 0);
  const RunResult lp = run("mitigate lowpass " + d("raw/im1.pgm") + " --kernel 9 --out-dir " + d("lp"));
  ASSERT_EQ(lp.code, 0) << lp.err;
  EXPECT_TRUE(fs::exists(dir_ / "lp" / "im1.pgm"));
  EXPECT_EQ(run("mitigate lowpass " + d("raw/im1.pgm") + " --kernel 4 --out-dir " + d("lp")).code, 2);

  const RunResult t = run("mitigate tune --noise-freq 24000 --fps-min 29 --fps-max 31 --frame-length-min 800 --frame-length-max 800 --out-dir " + d());
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_NE(t.out.find("fps 29\n"), std::string::npos);
  EXPECT_NE(t.out.find("band height 14.5 rows"), std::string::npos);

  const RunResult f = run("mitigate filter --freq 10000 --cutoff 1000 --out-dir " + d());
  ASSERT_EQ(f.code, 0) << f.err;
  EXPECT_EQ(f.out, "attenuation 0.0995\n");
  EXPECT_EQ(run("mitigate --out-dir " + d()).code, 2);
}

}  // namespace
}  // namespace rownoise
