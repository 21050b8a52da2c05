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

#pragma once

// The twoseg command-line tool. Every command writes <out>.manifest.json with
// its argv, resolved parameters, input/output hashes and the tool version;
// `twoseg replay <manifest>` checks the inputs and reproduces the outputs.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "twoseg/alt.hpp"
#include "twoseg/core.hpp"
#include "twoseg/estimators.hpp"
#include "twoseg/json_io.hpp"
#include "twoseg/metrics.hpp"
#include "twoseg/mrf.hpp"
#include "twoseg/netpbm.hpp"
#include "twoseg/quantize.hpp"
#include "twoseg/stats.hpp"
#include "twoseg/synth.hpp"

#ifndef TWOSEG_VERSION
#define TWOSEG_VERSION "0.0.0"
#endif

namespace twoseg::cli {

inline constexpr const char* kVersion = TWOSEG_VERSION;

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
inline std::string fnv1a_file(const std::string& path) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : detail::read_file(path)) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

/// Deterministic per-cell seed for benchmark streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t z = seed;
  for (std::uint64_t v : {a, b, c}) {
    z += 0x9e3779b97f4a7c15ULL + v;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
  }
  return z;
}

/// Collects what a command read and wrote for its manifest.
class RunRecord {
 public:
  RunRecord(std::string command, std::vector<std::string> argv) : command_(std::move(command)), argv_(std::move(argv)) {}

  Json& params() { return params_; }
  void input(const std::string& path) { inputs_.push_back(path); }
  void output(const std::string& path) { outputs_.push_back(path); }

  void write_manifest(const std::string& path) const {
    Json j;
    j["tool"] = "twoseg";
    j["version"] = kVersion;
    j["command"] = command_;
    j["argv"] = argv_;
    j["parameters"] = params_;
    Json in = Json::object();
    for (const auto& p : inputs_) in[p] = fnv1a_file(p);
    Json out = Json::object();
    for (const auto& p : outputs_) out[p] = fnv1a_file(p);
    j["inputs"] = in;
    j["outputs"] = out;
    write_json(j, path);
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  Json params_ = Json::object();
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

struct Input {
  LabelImage labels;
  std::optional<Palette> palette;
  /// Display image for overlays: the original RGB, or a gray ramp of the labels.
  RgbImage display;
};

/// Grayscale files are used as-is; RGB files are quantized first.
inline Input load_input(const std::string& path, std::size_t max_bucket, std::uint64_t seed) {
  auto loaded = load_image(path);
  if (auto* gray = std::get_if<LabelImage>(&loaded)) {
    auto display = render_gray(*gray);
    return {std::move(*gray), std::nullopt, std::move(display)};
  }
  auto& rgb = std::get<RgbImage>(loaded);
  auto q = quantize_colors(rgb, max_bucket, seed);
  return {std::move(q.labels), std::move(q.palette), std::move(rgb)};
}

inline std::vector<double> parse_grid(const std::string& s) {
  if (s.empty()) return default_w0_grid();
  std::vector<double> g;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      g.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InvalidArgument("--w0-grid: cannot parse '" + item + "'");
    }
  }
  return g;
}

inline Json search_params(const SearchConfig& c) {
  return {{"method", to_string(c.method)}, {"rho", c.rho}, {"kappa", c.kappa}, {"w0_grid", c.w0_grid}};
}

/// Round-trip decimal, or an empty field for non-finite values.
inline std::string csv_num(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct Options {
  // shared
  std::string image;
  std::string out;
  std::size_t max_bucket = 1000;
  std::uint64_t seed = 0;
  // estimation
  std::string method = "spectral";
  double rho = 0.03;
  double kappa = 0.47;
  std::string w0_grid;
  // segmentation / alt
  std::string model;
  double lambda = 5.0;
  std::string overlay;
  double smoothing_k = 1.0;
  std::size_t max_iters = 50;
  std::string gt_models;
  // synth
  std::string mask = "half_vertical";
  std::size_t size = 320;
  std::string mode = "iid";
  std::size_t k = 64;
  // eval
  std::string gt;
  std::string est;
  std::string est_models;
  // diagnose
  int r_max = 50;
  // bench
  std::string suite = "iid";
  std::size_t trials = 10;
  double bench_rho = 0.06;
  // replay
  std::string manifest;
};

inline SearchConfig search_config(const Options& o) {
  SearchConfig c;
  c.method = method_from_string(o.method);
  c.rho = o.rho;
  c.kappa = o.kappa;
  c.w0_grid = parse_grid(o.w0_grid);
  return c;
}

inline void write_palette_if_any(const Input& in, const std::string& out, RunRecord& rec) {
  if (!in.palette) return;
  const std::string path = out + ".palette.json";
  write_json(palette_to_json(*in.palette), path);
  rec.output(path);
}

inline void cmd_estimate(const Options& o, RunRecord& rec, std::ostream& log) {
  const auto config = search_config(o);
  rec.params() = search_params(config);
  rec.params()["max_bucket"] = o.max_bucket;
  rec.params()["seed"] = o.seed;
  rec.input(o.image);
  const auto in = load_input(o.image, o.max_bucket, o.seed);
  const auto result = estimate_image(in.labels, config);
  rec.params()["r"] = result.r;
  write_json(model_to_json({result.estimate, result.r, o.method}), o.out);
  rec.output(o.out);
  write_palette_if_any(in, o.out, rec);
  log << "k=" << in.labels.k() << " r=" << result.r << " w0=" << result.estimate.params.w0()
      << " residual=" << result.estimate.residual << "\n";
}

inline void cmd_segment(const Options& o, RunRecord& rec, std::ostream& log) {
  const EnergyParams energy_params{o.lambda};
  energy_params.validate();
  rec.params()["lambda"] = o.lambda;
  rec.params()["max_bucket"] = o.max_bucket;
  rec.params()["seed"] = o.seed;
  rec.input(o.image);
  const auto in = load_input(o.image, o.max_bucket, o.seed);
  ModelEstimate model = [&] {
    if (!o.model.empty()) {
      rec.input(o.model);
      rec.params()["model"] = o.model;
      return model_from_json(read_json(o.model)).estimate;
    }
    const auto config = search_config(o);
    rec.params().update(search_params(config));
    auto result = estimate_image(in.labels, config);
    rec.params()["r"] = result.r;
    const std::string model_path = o.out + ".model.json";
    write_json(model_to_json({result.estimate, result.r, o.method}), model_path);
    rec.output(model_path);
    return result.estimate;
  }();
  const auto mask = segment_graphcut(in.labels, model.theta0, model.theta1, energy_params);
  save_mask(mask, o.out);
  rec.output(o.out);
  write_palette_if_any(in, o.out, rec);
  if (!o.overlay.empty()) {
    save_overlay(in.display, mask, o.overlay);
    rec.output(o.overlay);
  }
  log << "w0(mask)=" << mask.w0() << " boundary=" << mask.boundary_length() << "\n";
}

inline void cmd_synth(const Options& o, RunRecord& rec, std::ostream& log) {
  const auto kind = mask_kind_from_string(o.mask);
  if (o.mode != "iid" && o.mode != "texture") throw InvalidArgument("--mode must be iid or texture");
  if (o.k < 2 || o.k > 256) throw InvalidArgument("--k must lie in [2, 256]");
  rec.params() = {{"mask", o.mask}, {"size", o.size}, {"mode", o.mode}, {"seed", o.seed}, {"k", o.k}};
  const auto mask = gen_mask(kind, o.size, o.size);
  std::optional<LabelImage> img;
  Distribution t0 = Distribution::uniform(o.k), t1 = Distribution::uniform(o.k);
  if (o.mode == "iid") {
    t0 = random_model(o.k, mix_seed(o.seed, 0, 0, 0));
    t1 = random_model(o.k, mix_seed(o.seed, 0, 0, 1));
    img = gen_iid(mask, t0, t1, mix_seed(o.seed, 0, 0, 2));
  } else {
    rec.params()["min_diagonal"] = 0.7;
    const TextureSpec s0{random_transition(o.k, 0.7, mix_seed(o.seed, 1, 0, 0)), mix_seed(o.seed, 1, 0, 2)};
    const TextureSpec s1{random_transition(o.k, 0.7, mix_seed(o.seed, 1, 0, 1)), mix_seed(o.seed, 1, 0, 3)};
    t0 = stationary_distribution(s0.transition);
    t1 = stationary_distribution(s1.transition);
    img = gen_texture(mask, s0, s1);
  }
  const std::string image_path = o.out + "_image.pgm";
  const std::string mask_path = o.out + "_mask.pgm";
  const std::string models_path = o.out + "_models.json";
  save_label_image(*img, image_path);
  save_mask(mask, mask_path);
  ModelEstimate truth{MixtureParams(mask.w0(), 0.0), t0, t1, 0.0};
  write_json(model_to_json({truth, 0, "synth_" + o.mode}), models_path);
  for (const auto& p : {image_path, mask_path, models_path}) rec.output(p);
  log << "wrote " << image_path << ", " << mask_path << ", " << models_path << "\n";
}

inline void cmd_eval(const Options& o, RunRecord& rec, std::ostream& log) {
  rec.input(o.gt);
  rec.input(o.est);
  const auto gt = load_mask(o.gt);
  const auto est = load_mask(o.est);
  const auto score = segmentation_score(gt, est);
  EvalReport report;
  report.jac = score.jac;
  report.mask_swapped = score.swapped;
  const bool has_models = !o.gt_models.empty() && !o.est_models.empty();
  if (has_models) {
    rec.input(o.gt_models);
    rec.input(o.est_models);
    const auto g = model_from_json(read_json(o.gt_models)).estimate;
    const auto e = model_from_json(read_json(o.est_models)).estimate;
    const auto d = model_distance(g.theta0, g.theta1, e.theta0, e.theta1);
    report.d_b = d.d_b;
    report.models_swapped = d.swapped;
  }
  write_json(report_to_json(report, has_models), o.out);
  rec.output(o.out);
  log << "jac=" << report.jac;
  if (has_models) log << " d_b=" << report.d_b;
  log << "\n";
}

inline void cmd_alt(const Options& o, RunRecord& rec, std::ostream& log) {
  AltConfig config;
  config.lambda = o.lambda;
  config.smoothing_k = o.smoothing_k;
  config.max_iters = o.max_iters;
  config.validate();
  rec.params() = {{"lambda", o.lambda}, {"K", o.smoothing_k}, {"max_iters", o.max_iters},
                  {"max_bucket", o.max_bucket}, {"seed", o.seed}};
  rec.input(o.image);
  const auto in = load_input(o.image, o.max_bucket, o.seed);
  std::optional<ModelEstimate> truth;
  if (!o.gt_models.empty()) {
    rec.input(o.gt_models);
    truth = model_from_json(read_json(o.gt_models)).estimate;
  }
  const auto result = alt_run(in.labels, config);

  std::ofstream csv(o.out);
  if (!csv) throw IoError("cannot write '" + o.out + "'");
  csv << "iteration,energy,boundary_length,w0,d_b\n";
  for (const auto& step : result.trace) {
    csv << step.iteration << "," << csv_num(step.energy) << "," << step.boundary_length << "," << csv_num(step.w0)
        << ",";
    if (truth) csv << csv_num(model_distance(truth->theta0, truth->theta1, step.theta0, step.theta1).d_b);
    csv << "\n";
  }
  csv.close();
  if (!csv) throw IoError("write failed for '" + o.out + "'");
  rec.output(o.out);

  const std::string mask_path = o.out + ".mask.pgm";
  const std::string model_path = o.out + ".model.json";
  save_mask(result.mask, mask_path);
  write_json(model_to_json({result.estimate, 0, "alt"}), model_path);
  rec.output(mask_path);
  rec.output(model_path);
  write_palette_if_any(in, o.out, rec);
  log << "iterations=" << result.iterations << " converged=" << (result.converged ? "true" : "false")
      << " single_region=" << (result.single_region() ? "true" : "false") << "\n";
}

inline void cmd_diagnose(const Options& o, RunRecord& rec, std::ostream& log) {
  rec.params() = {{"r_max", o.r_max}, {"max_bucket", o.max_bucket}, {"seed", o.seed}};
  rec.input(o.image);
  const auto in = load_input(o.image, o.max_bucket, o.seed);
  const auto min_side = std::min(in.labels.width(), in.labels.height());
  if (o.r_max < 1) throw InvalidArgument("--r-max must be >= 1");
  if (static_cast<std::size_t>(o.r_max) >= min_side) {
    throw InvalidArgument("--r-max " + std::to_string(o.r_max) + " must be below the smaller image side " +
                          std::to_string(min_side));
  }
  const auto alpha = estimate_alpha(in.labels);
  std::ofstream csv(o.out);
  if (!csv) throw IoError("cannot write '" + o.out + "'");
  csv << "r,gap\n";
  for (int r = 1; r <= o.r_max; ++r) {
    csv << r << "," << csv_num(rank_one_residual(alpha, estimate_beta(in.labels, r)).frobenius_norm()) << "\n";
  }
  csv.close();
  if (!csv) throw IoError("write failed for '" + o.out + "'");
  rec.output(o.out);
  log << "wrote " << o.r_max << " rows\n";
}

/// One benchmark trial's ground truth.
struct BenchCase {
  LabelImage image;
  BinaryMask mask;
};

inline BenchCase bench_case(const std::string& suite, MaskKind kind, std::size_t size, std::size_t k,
                            std::uint64_t seed, std::size_t mask_index, std::size_t trial) {
  auto mask = gen_mask(kind, size, size);
  // Appearance models are shared across masks within a trial; images are not.
  if (suite == "iid") {
    const auto t0 = random_model(k, mix_seed(seed, 0, trial, 0));
    const auto t1 = random_model(k, mix_seed(seed, 0, trial, 1));
    auto img = gen_iid(mask, t0, t1, mix_seed(seed, 1 + mask_index, trial, 2));
    return {std::move(img), std::move(mask)};
  }
  const TextureSpec s0{random_transition(k, 0.7, mix_seed(seed, 0, trial, 0)), mix_seed(seed, 1 + mask_index, trial, 2)};
  const TextureSpec s1{random_transition(k, 0.7, mix_seed(seed, 0, trial, 1)), mix_seed(seed, 1 + mask_index, trial, 3)};
  auto img = gen_texture(mask, s0, s1);
  return {std::move(img), std::move(mask)};
}

inline void cmd_bench(const Options& o, RunRecord& rec, std::ostream& log) {
  if (o.suite != "iid" && o.suite != "texture") throw InvalidArgument("--suite must be iid or texture");
  if (o.trials < 1) throw InvalidArgument("--trials must be >= 1");
  if (o.k < 2 || o.k > 256) throw InvalidArgument("--k must lie in [2, 256]");
  SearchConfig base;
  base.rho = o.bench_rho;
  base.kappa = o.kappa;
  base.w0_grid = parse_grid(o.w0_grid);
  AltConfig alt_config;
  alt_config.lambda = o.lambda;
  alt_config.smoothing_k = o.smoothing_k;
  alt_config.max_iters = o.max_iters;
  const EnergyParams energy_params{o.lambda};
  rec.params() = {{"suite", o.suite}, {"trials", o.trials}, {"seed", o.seed}, {"size", o.size}, {"k", o.k},
                  {"rho", o.bench_rho}, {"kappa", o.kappa}, {"w0_grid", base.w0_grid}, {"lambda", o.lambda},
                  {"K", o.smoothing_k}, {"max_iters", o.max_iters}};

  const std::vector<std::string> methods = {"algebraic", "spectral", "alt"};
  using Clock = std::chrono::steady_clock;
  std::ofstream csv(o.out);
  if (!csv) throw IoError("cannot write '" + o.out + "'");
  const std::string timing_path = o.out + ".timing.csv";
  std::ofstream timing(timing_path);
  if (!timing) throw IoError("cannot write '" + timing_path + "'");
  csv << "suite,mask,method,trials,mean_d_b,mean_jac\n";
  timing << "suite,mask,method,trials,mean_estimate_seconds,mean_total_seconds\n";

  for (std::size_t m = 0; m < kAllMaskKinds.size(); ++m) {
    const auto kind = kAllMaskKinds[m];
    std::vector<double> sum_db(3, 0.0), sum_jac(3, 0.0), sum_est(3, 0.0), sum_total(3, 0.0);
    for (std::size_t t = 0; t < o.trials; ++t) {
      const auto c = bench_case(o.suite, kind, o.size, o.k, o.seed, m, t);
      // D_B is measured against the ground-truth region histograms.
      const auto gt0 = region_histogram(c.image, c.mask, 0, 0.0);
      const auto gt1 = region_histogram(c.image, c.mask, 1, 0.0);
      const auto t_stats = Clock::now();
      const int r = radius_from_rho(base.rho, c.image);
      const auto beta = estimate_beta(c.image, r);
      const auto alpha = pair_marginal(beta);
      const double stats_seconds = std::chrono::duration<double>(Clock::now() - t_stats).count();
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const auto t0 = Clock::now();
        ModelPair models{gt0, gt1};
        BinaryMask seg = c.mask;
        double est_seconds = 0.0;
        if (mi < 2) {
          SearchConfig config = base;
          config.method = mi == 0 ? Method::kAlgebraic : Method::kSpectral;
          auto e = search_w0(alpha, beta, config);
          est_seconds = std::chrono::duration<double>(Clock::now() - t0).count() + stats_seconds;
          seg = segment_graphcut(c.image, e.theta0, e.theta1, energy_params);
          models = {std::move(e.theta0), std::move(e.theta1)};
        } else {
          auto result = alt_run(c.image, alt_config);
          est_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
          seg = std::move(result.mask);
          models = {std::move(result.estimate.theta0), std::move(result.estimate.theta1)};
        }
        const double total = std::chrono::duration<double>(Clock::now() - t0).count() + (mi < 2 ? stats_seconds : 0);
        sum_db[mi] += model_distance(gt0, gt1, models.theta0, models.theta1).d_b;
        sum_jac[mi] += segmentation_score(c.mask, seg).jac;
        sum_est[mi] += est_seconds;
        sum_total[mi] += total;
      }
    }
    const double n = static_cast<double>(o.trials);
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const std::string row = o.suite + "," + to_string(kind) + "," + methods[mi] + "," + std::to_string(o.trials);
      csv << row << "," << csv_num(sum_db[mi] / n) << "," << csv_num(sum_jac[mi] / n) << "\n";
      timing << row << "," << csv_num(sum_est[mi] / n) << "," << csv_num(sum_total[mi] / n) << "\n";
      log << std::left << std::setw(16) << to_string(kind) << std::setw(10) << methods[mi]
          << " d_b=" << std::setw(12) << sum_db[mi] / n << " jac=" << std::setw(10) << sum_jac[mi] / n
          << " est_s=" << sum_est[mi] / n << "\n";
    }
  }
  csv.close();
  timing.close();
  if (!csv || !timing) throw IoError("write failed for '" + o.out + "'");
  // Wall times vary run to run, so the timing file is not part of the
  // reproducible output set.
  rec.output(o.out);
}

int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

inline void cmd_replay(const Options& o, std::ostream& out, std::ostream& err) {
  const auto m = read_json(o.manifest);
  try {
    for (const auto& [path, hash] : m.at("inputs").items()) {
      const auto now = fnv1a_file(path);
      if (now != hash.get<std::string>()) {
        throw Error("input '" + path + "' changed: hash " + now + " != recorded " + hash.get<std::string>());
      }
    }
    const auto argv = m.at("argv").get<std::vector<std::string>>();
    if (!argv.empty() && argv.front() == "replay") throw InvalidArgument("manifest records a replay");
    if (run(argv, out, err) != 0) throw Error("replayed command failed");
    for (const auto& [path, hash] : m.at("outputs").items()) {
      const auto now = fnv1a_file(path);
      if (now != hash.get<std::string>()) {
        throw Error("output '" + path + "' differs: hash " + now + " != recorded " + hash.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("manifest '" + o.manifest + "': " + e.what());
  }
  out << "replay ok: " << m.at("outputs").size() << " outputs reproduced\n";
}

/// Runs one command; args excludes the program name. Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-region appearance model estimation and segmentation", "twoseg"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  auto add_image = [&](CLI::App* c) { c->add_option("image", o.image, "Input PGM/PPM image")->required(); };
  auto add_out = [&](CLI::App* c, const std::string& help) { c->add_option("--out", o.out, help)->required(); };
  auto add_quantize = [&](CLI::App* c) {
    c->add_option("--max-bucket", o.max_bucket, "RGB quantization bucket size")->capture_default_str();
    c->add_option("--seed", o.seed, "Quantization seed")->capture_default_str();
  };
  auto add_search = [&](CLI::App* c) {
    c->add_option("--method", o.method, "algebraic | spectral")
        ->check(CLI::IsMember({"algebraic", "spectral"}))
        ->capture_default_str();
    c->add_option("--rho", o.rho, "Scale parameter, r = rho*sqrt(|Omega|)")->capture_default_str();
    c->add_option("--kappa", o.kappa, "eps_r = kappa*rho")->capture_default_str();
    c->add_option("--w0-grid", o.w0_grid, "Comma-separated w0 candidates (default 0.05..0.95)");
  };

  auto* estimate = app.add_subcommand("estimate", "Estimate two appearance models from an image");
  add_image(estimate);
  add_search(estimate);
  add_quantize(estimate);
  add_out(estimate, "Model JSON");

  auto* segment = app.add_subcommand("segment", "Estimate models (or load them) and segment by graph cut");
  add_image(segment);
  segment->add_option("--model", o.model, "Model JSON; estimated from the image when absent");
  add_search(segment);
  add_quantize(segment);
  segment->add_option("--lambda", o.lambda, "Boundary weight")->capture_default_str();
  segment->add_option("--overlay", o.overlay, "Write a PPM with the region contour drawn");
  add_out(segment, "Mask PGM");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic two-region image");
  synth->add_option("--mask", o.mask, "half_vertical | centered_disk | quarter_square | diagonal_band")
      ->capture_default_str();
  synth->add_option("--size", o.size, "Image side in pixels")->capture_default_str();
  synth->add_option("--mode", o.mode, "iid | texture")->capture_default_str();
  synth->add_option("--seed", o.seed)->capture_default_str();
  synth->add_option("--k", o.k, "Alphabet size")->capture_default_str();
  add_out(synth, "Output prefix");

  auto* eval = app.add_subcommand("eval", "Score an estimated mask (and models) against ground truth");
  eval->add_option("--gt", o.gt, "Ground-truth mask PGM")->required();
  eval->add_option("--est", o.est, "Estimated mask PGM")->required();
  eval->add_option("--gt-models", o.gt_models, "Ground-truth model JSON");
  eval->add_option("--est-models", o.est_models, "Estimated model JSON");
  add_out(eval, "Report JSON");

  auto* alt = app.add_subcommand("alt", "Run the histogram/graph-cut alternation baseline");
  add_image(alt);
  alt->add_option("--lambda", o.lambda)->capture_default_str();
  alt->add_option("--K", o.smoothing_k, "Histogram smoothing constant")->capture_default_str();
  alt->add_option("--max-iters", o.max_iters)->capture_default_str();
  alt->add_option("--gt-models", o.gt_models, "Ground-truth model JSON for the d_b column");
  add_quantize(alt);
  add_out(alt, "Trace CSV");

  auto* diagnose = app.add_subcommand("diagnose", "Independence gap ||beta - alpha alpha^T|| for r = 1..r_max");
  add_image(diagnose);
  diagnose->add_option("--r-max", o.r_max)->capture_default_str();
  add_quantize(diagnose);
  add_out(diagnose, "CSV");

  auto* bench = app.add_subcommand("bench", "Synthetic benchmark over all mask kinds");
  bench->add_option("--suite", o.suite, "iid | texture")->capture_default_str();
  bench->add_option("--trials", o.trials)->capture_default_str();
  bench->add_option("--seed", o.seed)->capture_default_str();
  bench->add_option("--size", o.size)->capture_default_str();
  bench->add_option("--k", o.k)->capture_default_str();
  bench->add_option("--rho", o.bench_rho)->capture_default_str();
  bench->add_option("--kappa", o.kappa)->capture_default_str();
  bench->add_option("--w0-grid", o.w0_grid);
  bench->add_option("--lambda", o.lambda)->capture_default_str();
  bench->add_option("--K", o.smoothing_k)->capture_default_str();
  bench->add_option("--max-iters", o.max_iters)->capture_default_str();
  add_out(bench, "Summary CSV");

  auto* replay = app.add_subcommand("replay", "Re-run a manifest and verify its outputs");
  replay->add_option("manifest", o.manifest)->required();

  std::vector<std::string> argv_store = {"twoseg"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    if (replay->parsed()) {
      cmd_replay(o, out, err);
      return 0;
    }
    auto* sub = app.get_subcommands().front();
    RunRecord rec(sub->get_name(), args);
    if (sub == estimate) cmd_estimate(o, rec, out);
    if (sub == segment) cmd_segment(o, rec, out);
    if (sub == synth) cmd_synth(o, rec, out);
    if (sub == eval) cmd_eval(o, rec, out);
    if (sub == alt) cmd_alt(o, rec, out);
    if (sub == diagnose) cmd_diagnose(o, rec, out);
    if (sub == bench) cmd_bench(o, rec, out);
    rec.write_manifest(o.out + ".manifest.json");
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace twoseg::cli
