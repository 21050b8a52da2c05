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

// s-t max-flow / min-cut on a directed network with real capacities, using
// shortest augmenting paths (Dinic: BFS level graph + blocking flow).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "twoseg/core.hpp"

namespace twoseg {

class FlowNetwork {
 public:
  struct Arc {
    std::size_t from;
    std::size_t to;
    double capacity;
  };

  FlowNetwork(std::size_t node_count, std::size_t source, std::size_t sink)
      : nodes_(node_count), source_(source), sink_(sink) {
    if (source >= node_count || sink >= node_count) throw InvalidArgument("terminal index out of range");
    if (source == sink) throw InvalidArgument("source and sink must differ");
  }

  /// Adds u->v with capacity cap_uv and v->u with capacity cap_vu as one
  /// residual pair.
  void add_edge(std::size_t u, std::size_t v, double cap_uv, double cap_vu = 0.0) {
    if (u >= nodes_ || v >= nodes_) throw InvalidArgument("arc endpoint out of range");
    if (!(cap_uv >= 0.0) || !(cap_vu >= 0.0) || !std::isfinite(cap_uv) || !std::isfinite(cap_vu)) {
      throw InvalidArgument("arc capacities must be finite and >= 0");
    }
    arcs_.push_back({u, v, cap_uv});
    arcs_.push_back({v, u, cap_vu});
  }

  void reserve_edges(std::size_t n) { arcs_.reserve(2 * n); }

  std::size_t node_count() const { return nodes_; }
  std::size_t source() const { return source_; }
  std::size_t sink() const { return sink_; }
  /// Arcs in residual-pair order: arc 2e and 2e+1 are mutual reverses.
  const std::vector<Arc>& arcs() const { return arcs_; }

  /// Total capacity of arcs leaving the set marked 1 in `source_side`.
  double cut_capacity(const std::vector<std::uint8_t>& source_side) const {
    double c = 0.0;
    for (const auto& a : arcs_) {
      if (source_side[a.from] && !source_side[a.to]) c += a.capacity;
    }
    return c;
  }

 private:
  std::size_t nodes_;
  std::size_t source_;
  std::size_t sink_;
  std::vector<Arc> arcs_;
};

struct MaxFlowResult {
  double flow = 0.0;
  /// 1 for nodes reachable from the source in the final residual network
  /// (the minimal source set of a minimum cut).
  std::vector<std::uint8_t> source_side;
};

inline MaxFlowResult max_flow(const FlowNetwork& net) {
  const std::size_t n = net.node_count();
  const auto& arcs = net.arcs();
  const std::size_t m = arcs.size();
  const std::size_t s = net.source();
  const std::size_t t = net.sink();

  double max_cap = 0.0;
  for (const auto& a : arcs) max_cap = std::max(max_cap, a.capacity);
  const double tol = max_cap * 1e-13;

  // CSR adjacency over arc ids.
  std::vector<std::size_t> start(n + 1, 0);
  for (const auto& a : arcs) ++start[a.from + 1];
  for (std::size_t v = 0; v < n; ++v) start[v + 1] += start[v];
  std::vector<std::size_t> adj(m);
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t e = 0; e < m; ++e) adj[fill[arcs[e].from]++] = e;
  }
  std::vector<double> res(m);
  for (std::size_t e = 0; e < m; ++e) res[e] = arcs[e].capacity;

  constexpr int kUnreached = -1;
  std::vector<int> level(n);
  std::vector<std::size_t> queue(n);
  auto build_levels = [&]() {
    std::fill(level.begin(), level.end(), kUnreached);
    std::size_t head = 0, tail = 0;
    level[s] = 0;
    queue[tail++] = s;
    while (head < tail) {
      const std::size_t u = queue[head++];
      for (std::size_t p = start[u]; p < start[u + 1]; ++p) {
        const std::size_t e = adj[p];
        const std::size_t v = arcs[e].to;
        if (res[e] > tol && level[v] == kUnreached) {
          level[v] = level[u] + 1;
          queue[tail++] = v;
        }
      }
    }
    return level[t] != kUnreached;
  };

  double total = 0.0;
  std::vector<std::size_t> cursor(n);
  std::vector<std::size_t> path;
  while (build_levels()) {
    for (std::size_t v = 0; v < n; ++v) cursor[v] = start[v];
    path.clear();
    std::size_t u = s;
    while (true) {
      if (u == t) {
        double f = std::numeric_limits<double>::infinity();
        for (std::size_t e : path) f = std::min(f, res[e]);
        std::size_t first_saturated = path.size();
        for (std::size_t i = 0; i < path.size(); ++i) {
          const std::size_t e = path[i];
          res[e] -= f;
          res[e ^ 1] += f;
          if (first_saturated == path.size() && res[e] <= tol) first_saturated = i;
        }
        total += f;
        path.resize(first_saturated);
        u = path.empty() ? s : arcs[path.back()].to;
        continue;
      }
      bool advanced = false;
      for (; cursor[u] < start[u + 1]; ++cursor[u]) {
        const std::size_t e = adj[cursor[u]];
        const std::size_t v = arcs[e].to;
        if (res[e] > tol && level[v] == level[u] + 1) {
          path.push_back(e);
          u = v;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      if (u == s) break;
      level[u] = kUnreached;
      const std::size_t e = path.back();
      path.pop_back();
      u = arcs[e].from;
      ++cursor[u];
    }
  }

  MaxFlowResult out;
  out.flow = total;
  out.source_side.assign(n, 0);
  std::size_t head = 0, tail = 0;
  out.source_side[s] = 1;
  queue[tail++] = s;
  while (head < tail) {
    const std::size_t u = queue[head++];
    for (std::size_t p = start[u]; p < start[u + 1]; ++p) {
      const std::size_t e = adj[p];
      const std::size_t v = arcs[e].to;
      if (res[e] > tol && !out.source_side[v]) {
        out.source_side[v] = 1;
        queue[tail++] = v;
      }
    }
  }

  const double cut = net.cut_capacity(out.source_side);
  if (std::abs(cut - total) > 1e-9 * std::max(1.0, std::abs(total))) {
    throw Error("max-flow/min-cut mismatch: flow " + std::to_string(total) + " vs cut " + std::to_string(cut));
  }
  return out;
}

}  // namespace twoseg
