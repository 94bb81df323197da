// tests/oracles.hpp
//
// Independent reference computations used to freeze expected values and
// to cross-check the library. Nothing here calls into the DP code it checks.

// Copyright 2026  The pausekit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <utility>
#include <vector>

namespace pausekit::oracle {

// Recursive edit distance over suffixes, memoized so exhaustive sweeps stay fast.
template <typename T>
std::size_t edit_distance(const std::vector<T> &a, const std::vector<T> &b) {
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  const std::size_t width = b.size() + 1;
  std::vector<std::size_t> memo((a.size() + 1) * width, kUnset);
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    std::size_t &slot = memo[i * width + j];
    if (slot != kUnset) return slot;
    std::size_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, go(i + 1, j) + 1);
    best = std::min(best, go(i, j + 1) + 1);
    return slot = best;
  };
  return go(0, 0);
}

// Every monotone path from (0,0) to (n-1,m-1) with right/down/diagonal
// steps, reported by its total cost.
inline std::vector<double> all_path_costs(const std::vector<std::vector<double>> &cost) {
  const std::size_t n = cost.size(), m = cost.front().size();
  std::vector<double> out;
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
    acc += cost[i][j];
    if (i == n - 1 && j == m - 1) {
      out.push_back(acc);
      return;
    }
    if (i + 1 < n) walk(i + 1, j, acc);
    if (j + 1 < m) walk(i, j + 1, acc);
    if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, 0.0);
  return out;
}

inline double hard_dtw(const std::vector<std::vector<double>> &cost) {
  const auto costs = all_path_costs(cost);
  return *std::min_element(costs.begin(), costs.end());
}

// -gamma log sum over paths exp(-cost/gamma), straight from the definition.
inline double soft_dtw_by_paths(const std::vector<std::vector<double>> &cost, double gamma) {
  const auto costs = all_path_costs(cost);
  const double lo = *std::min_element(costs.begin(), costs.end());
  double sum = 0.0;
  for (double c : costs) sum += std::exp(-(c - lo) / gamma);
  return lo - gamma * std::log(sum);
}

// Central differences of f at x, step h.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double> &)> &f,
                                            std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// ||a - b|| / max(||a||, ||b||), 0 when both vanish.
inline double relative_error(const std::vector<double> &a, const std::vector<double> &b) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(std::max(na, nb));
  return denom == 0.0 ? 0.0 : std::sqrt(diff) / denom;
}

// Naive triple loop: out = z * w + bias.
inline std::vector<std::vector<double>> affine(const std::vector<std::vector<double>> &z,
                                               const std::vector<std::vector<double>> &w,
                                               const std::vector<double> &bias) {
  std::vector<std::vector<double>> out(z.size(), bias);
  for (std::size_t t = 0; t < z.size(); ++t)
    for (std::size_t c = 0; c < bias.size(); ++c)
      for (std::size_t k = 0; k < w.size(); ++k) out[t][c] += z[t][k] * w[k][c];
  return out;
}

// All sequences over {0..alphabet-1} with length <= max_len.
inline std::vector<std::vector<int>> all_sequences(int alphabet, std::size_t max_len) {
  std::vector<std::vector<int>> out{{}};
  std::vector<std::vector<int>> frontier{{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto &s : frontier)
      for (int c = 0; c < alphabet; ++c) {
        auto t = s;
        t.push_back(c);
        next.push_back(std::move(t));
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

}  // namespace pausekit::oracle
