// Copyright 2026 The twoseg Authors
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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "twoseg/cli.hpp"

namespace twoseg {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(TWOSEG_TEST_TMPDIR) / ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  /// Small IID instance at path("s") with k = 8.
  void synth(const std::string& mask = "half_vertical", const std::string& mode = "iid") {
    const auto r = run({"synth", "--mask", mask, "--size", "48", "--k", "8", "--mode", mode, "--seed", "3", "--out",
                        path("s")});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

TEST_F(CliTest, SynthWritesTriplesAndIsDeterministic) {
  synth();
  const auto image = slurp(path("s_image.pgm"));
  const auto models = model_from_json(read_json(path("s_models.json")));
  EXPECT_EQ(models.method, "synth_iid");
  EXPECT_EQ(models.estimate.theta0.size(), 8u);
  EXPECT_EQ(models.estimate.params.w0(), 0.5);
  EXPECT_EQ(load_mask(path("s_mask.pgm")).w0(), 0.5);
  EXPECT_TRUE(fs::exists(path("s.manifest.json")));
  synth();
  EXPECT_EQ(slurp(path("s_image.pgm")), image);
}

TEST_F(CliTest, SynthTexture) {
  synth("centered_disk", "texture");
  EXPECT_EQ(model_from_json(read_json(path("s_models.json"))).method, "synth_texture");
  const auto img = std::get<LabelImage>(load_image(path("s_image.pgm")));
  EXPECT_EQ(img.width(), 48u);
  EXPECT_EQ(img.k(), 8u);
}

TEST_F(CliTest, SynthRejectsBadArguments) {
  auto r = run({"synth", "--size", "4", "--out", path("s")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_NE(run({"synth", "--mask", "hexagon", "--out", path("s")}).code, 0);
  EXPECT_NE(run({"synth", "--k", "1", "--out", path("s")}).code, 0);
  EXPECT_NE(run({"synth", "--mode", "gibbs", "--out", path("s")}).code, 0);
  EXPECT_NE(run({"synth"}).code, 0);
  EXPECT_NE(run({"frobnicate"}).code, 0);
}

TEST_F(CliTest, EstimateWritesModelAndManifest) {
  synth();
  const auto r = run({"estimate", path("s_image.pgm"), "--rho", "0.06", "--out", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = model_from_json(read_json(path("m.json")));
  EXPECT_EQ(m.method, "spectral");
  EXPECT_EQ(m.r, 3);  // round(0.06 * 48)
  EXPECT_EQ(m.estimate.theta0.size(), 8u);
  const auto manifest = read_json(path("m.json.manifest.json"));
  EXPECT_EQ(manifest["command"], "estimate");
  EXPECT_EQ(manifest["tool"], "twoseg");
  EXPECT_EQ(manifest["parameters"]["kappa"], 0.47);
  EXPECT_EQ(manifest["inputs"][path("s_image.pgm")], cli::fnv1a_file(path("s_image.pgm")));
  EXPECT_EQ(manifest["outputs"][path("m.json")], cli::fnv1a_file(path("m.json")));
}

TEST_F(CliTest, EstimateRejectsZeroRadius) {
  synth();
  const auto r = run({"estimate", path("s_image.pgm"), "--rho", "0", "--out", path("m.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("m.json")));
  EXPECT_NE(run({"estimate", path("s_image.pgm"), "--method", "magic", "--out", path("m.json")}).code, 0);
  EXPECT_NE(run({"estimate", path("s_image.pgm"), "--w0-grid", "0.2,x", "--out", path("m.json")}).code, 0);
  EXPECT_NE(run({"estimate", path("missing.pgm"), "--out", path("m.json")}).code, 0);
}

TEST_F(CliTest, SegmentWithGroundTruthModels) {
  synth();
  const auto r = run({"segment", path("s_image.pgm"), "--model", path("s_models.json"), "--lambda", "0", "--overlay",
                      path("o.ppm"), "--out", path("seg.pgm")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(fs::exists(path("seg.pgm.model.json")));
  const auto seg = load_mask(path("seg.pgm"));
  EXPECT_EQ(seg.width(), 48u);
  EXPECT_TRUE(std::holds_alternative<RgbImage>(load_image(path("o.ppm"))));
  // Without a boundary term each pixel takes its more likely region.
  const auto m = model_from_json(read_json(path("s_models.json"))).estimate;
  const auto img = std::get<LabelImage>(load_image(path("s_image.pgm")));
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const auto l = img.labels()[i];
    EXPECT_EQ(seg.bits()[i], m.theta1[l] > m.theta0[l] ? 1 : 0) << i;
  }
  EXPECT_NE(run({"segment", path("s_image.pgm"), "--lambda", "-1", "--out", path("seg.pgm")}).code, 0);
}

TEST_F(CliTest, SegmentEstimatesWhenNoModelGiven) {
  synth();
  const auto r = run({"segment", path("s_image.pgm"), "--rho", "0.06", "--out", path("seg.pgm")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("seg.pgm.model.json")));
  EXPECT_EQ(read_json(path("seg.pgm.manifest.json"))["outputs"].size(), 2u);
}

TEST_F(CliTest, RgbInputWritesPalette) {
  std::vector<Rgb> px(40 * 40);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = (i % 40) < 20 ? Rgb{200, 10, 10} : Rgb{10, 10, 200};
  save_rgb(RgbImage(40, 40, px), path("in.ppm"));
  const auto r = run({"segment", path("in.ppm"), "--max-bucket", "800", "--rho", "0.1", "--out", path("seg.pgm")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto palette = palette_from_json(read_json(path("seg.pgm.palette.json")));
  EXPECT_EQ(palette.size(), 2u);
}

TEST_F(CliTest, EvalIdenticalAndComplemented) {
  synth();
  auto r = run({"eval", "--gt", path("s_mask.pgm"), "--est", path("s_mask.pgm"), "--gt-models", path("s_models.json"),
                "--est-models", path("s_models.json"), "--out", path("e.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = read_json(path("e.json"));
  EXPECT_EQ(j["jac"], 1.0);
  EXPECT_EQ(j["d_b"], 0.0);

  auto mask = load_mask(path("s_mask.pgm"));
  std::vector<std::uint8_t> flipped(mask.bits().begin(), mask.bits().end());
  for (auto& b : flipped) b = !b;
  save_mask(BinaryMask(mask.width(), mask.height(), flipped), path("flip.pgm"));
  r = run({"eval", "--gt", path("s_mask.pgm"), "--est", path("flip.pgm"), "--out", path("e.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  j = read_json(path("e.json"));
  EXPECT_EQ(j["jac"], 1.0);
  EXPECT_EQ(j["swapped"], true);
  EXPECT_FALSE(j.contains("d_b"));
}

TEST_F(CliTest, EvalMissingModelFileFails) {
  synth();
  const auto r = run({"eval", "--gt", path("s_mask.pgm"), "--est", path("s_mask.pgm"), "--gt-models",
                      path("nope.json"), "--est-models", path("s_models.json"), "--out", path("e.json")});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, AltSingleIteration) {
  synth();
  const auto r = run({"alt", path("s_image.pgm"), "--max-iters", "1", "--gt-models", path("s_models.json"), "--out",
                      path("t.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("t.csv"));
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "iteration,energy,boundary_length,w0,d_b");
  EXPECT_EQ(row.rfind("1,", 0), 0u);
  EXPECT_NE(row.back(), ',');
  EXPECT_FALSE(std::getline(in, extra) && !extra.empty());
  EXPECT_TRUE(fs::exists(path("t.csv.mask.pgm")));
  EXPECT_EQ(model_from_json(read_json(path("t.csv.model.json"))).method, "alt");
}

TEST_F(CliTest, AltConstantImageReportsSingleRegion) {
  save_label_image(LabelImage(30, 30, std::vector<std::uint32_t>(900, 2), 4), path("c.pgm"));
  const auto r = run({"alt", path("c.pgm"), "--out", path("t.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("single_region=true"), std::string::npos);
  EXPECT_NE(run({"alt", path("c.pgm"), "--K", "-1", "--out", path("t.csv")}).code, 0);
}

TEST_F(CliTest, Diagnose) {
  synth();
  auto r = run({"diagnose", path("s_image.pgm"), "--r-max", "10", "--out", path("d.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("d.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 10);
  r = run({"diagnose", path("s_image.pgm"), "--r-max", "48", "--out", path("d.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("r-max"), std::string::npos);
}

TEST_F(CliTest, BenchIsDeterministic) {
  const std::vector<std::string> args = {"bench", "--trials", "1", "--size", "32", "--k", "4", "--max-iters", "3",
                                         "--out", path("b.csv")};
  auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto first = slurp(path("b.csv"));
  EXPECT_EQ(std::count(first.begin(), first.end(), '\n'), 1 + 4 * 3);
  EXPECT_TRUE(fs::exists(path("b.csv.timing.csv")));
  r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("b.csv")), first);
  EXPECT_NE(run({"bench", "--suite", "gauss", "--out", path("b.csv")}).code, 0);
}

TEST_F(CliTest, ReplayReproducesOutputs) {
  synth();
  ASSERT_EQ(run({"estimate", path("s_image.pgm"), "--rho", "0.06", "--out", path("m.json")}).code, 0);
  auto r = run({"replay", path("m.json.manifest.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  r = run({"replay", path("s.manifest.json")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, ReplayDetectsChangedInput) {
  synth();
  ASSERT_EQ(run({"estimate", path("s_image.pgm"), "--rho", "0.06", "--out", path("m.json")}).code, 0);
  auto img = std::get<LabelImage>(load_image(path("s_image.pgm")));
  std::vector<std::uint32_t> labels(img.labels().begin(), img.labels().end());
  labels[0] = (labels[0] + 1) % 8;
  save_label_image(LabelImage(48, 48, labels, 8), path("s_image.pgm"));
  const auto r = run({"replay", path("m.json.manifest.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("changed"), std::string::npos);
  EXPECT_NE(run({"replay", path("nope.json")}).code, 0);
}

}  // namespace
}  // namespace twoseg
