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

// JSON forms of models, evaluation reports and palettes. Doubles are written
// in shortest round-trip form, so a parse of a written value is bit-identical.
//
// Model file: {k, w0, w1, eps_r, r, theta0[], theta1[], residual, method}
// Palette file: [{label, rgb_centroid: [r, g, b], count}, ...]

#include <cmath>
#include <fstream>
#include <string>

#include "json.hpp"
#include "twoseg/core.hpp"
#include "twoseg/metrics.hpp"
#include "twoseg/quantize.hpp"

namespace twoseg {

using Json = nlohmann::ordered_json;

struct ModelFile {
  ModelEstimate estimate;
  int r = 0;
  std::string method;
};

inline Json model_to_json(const ModelFile& m) {
  const auto& e = m.estimate;
  Json j;
  j["k"] = e.theta0.size();
  j["w0"] = e.params.w0();
  j["w1"] = e.params.w1();
  j["eps_r"] = e.params.eps_r();
  j["r"] = m.r;
  j["theta0"] = std::vector<double>(e.theta0.probs().begin(), e.theta0.probs().end());
  j["theta1"] = std::vector<double>(e.theta1.probs().begin(), e.theta1.probs().end());
  j["residual"] = e.residual;
  j["method"] = m.method;
  return j;
}

inline ModelFile model_from_json(const Json& j) {
  try {
    const auto k = j.at("k").get<std::size_t>();
    Distribution t0(j.at("theta0").get<std::vector<double>>());
    Distribution t1(j.at("theta1").get<std::vector<double>>());
    if (t0.size() != k || t1.size() != k) throw InvalidArgument("model file: theta length does not match k");
    MixtureParams params(j.at("w0").get<double>(), j.at("eps_r").get<double>());
    const double residual = j.at("residual").get<double>();
    if (!(residual >= 0.0)) throw InvalidArgument("model file: residual must be >= 0");
    return {ModelEstimate{params, std::move(t0), std::move(t1), residual}, j.at("r").get<int>(),
            j.at("method").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("model file: ") + e.what());
  }
}

/// Infinite distances are written as null.
inline Json report_to_json(const EvalReport& r, bool has_models) {
  Json j;
  j["jac"] = r.jac;
  j["swapped"] = r.mask_swapped;
  if (has_models) {
    if (std::isfinite(r.d_b)) {
      j["d_b"] = r.d_b;
    } else {
      j["d_b"] = nullptr;
    }
    j["models_swapped"] = r.models_swapped;
  }
  return j;
}

inline Json palette_to_json(const Palette& p) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < p.entries.size(); ++i) {
    const auto& e = p.entries[i];
    arr.push_back({{"label", i}, {"rgb_centroid", {e.centroid[0], e.centroid[1], e.centroid[2]}}, {"count", e.count}});
  }
  return arr;
}

inline Palette palette_from_json(const Json& arr) {
  Palette p;
  try {
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& e = arr.at(i);
      if (e.at("label").get<std::size_t>() != i) throw InvalidArgument("palette labels must be 0..k-1 in order");
      const auto c = e.at("rgb_centroid").get<std::vector<double>>();
      if (c.size() != 3) throw InvalidArgument("palette centroid must have 3 channels");
      p.entries.push_back({{c[0], c[1], c[2]}, e.at("count").get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("palette file: ") + e.what());
  }
  return p;
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

inline void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace twoseg
