// pausekit/soft_dtw.hpp

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
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pausekit/error.hpp"

namespace pausekit {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols)
      throw Error(ErrorCode::kShapeMismatch, "matrix data does not match its shape");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> &data() { return data_; }
  const std::vector<double> &data() const { return data_; }

  friend bool operator==(const Matrix &, const Matrix &) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// -gamma * log(sum_i exp(-v_i / gamma)), shifted by the minimum for
/// stability. gamma == 0 is the hard minimum.
inline double soft_min(std::span<const double> values, double gamma) {
  if (values.empty()) throw Error(ErrorCode::kEmptyList, "soft_min of no values");
  if (!(gamma >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be >= 0");
  const double lo = *std::min_element(values.begin(), values.end());
  if (gamma == 0.0 || !std::isfinite(lo)) return lo;
  double sum = 0.0;
  for (double v : values) sum += std::exp(-(v - lo) / gamma);
  return lo - gamma * std::log(sum);
}

struct SoftDtwResult {
  double value = 0.0;
  Matrix grad_cost;  // d value / d cost, the expected alignment
};

/// Soft-DTW over a pairwise cost matrix with right, down and diagonal steps.
///
///   R(0,0) = C(0,0)
///   R(i,j) = C(i,j) + softmin_gamma{R(i-1,j), R(i,j-1), R(i-1,j-1)}
///
/// and value = R(n-1,m-1). The gradient comes from the reverse recursion
///
///   E(i,j) = sum over successors s of E(s) * exp((R(s) - C(s) - R(i,j)) / gamma)
///
/// whose factors are the soft-min weights each successor puts on (i,j).
/// At gamma == 0 this is plain DTW and the gradient is the indicator of
/// one optimal path, with ties resolved diagonal, then up, then left.
inline SoftDtwResult soft_dtw(const Matrix &cost, double gamma) {
  if (cost.empty()) throw Error(ErrorCode::kEmptyMatrix, "soft_dtw of an empty cost matrix");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw Error(ErrorCode::kInvalidArgument, "gamma must be finite and >= 0");
  for (double c : cost.data())
    if (!std::isfinite(c)) throw Error(ErrorCode::kNonFiniteCost, "cost matrix has a non-finite entry");

  const std::size_t n = cost.rows(), m = cost.cols();
  enum Step : unsigned char { kDiag, kUp, kLeft };
  Matrix R(n, m);
  std::vector<unsigned char> step(n * m, kDiag);  // hard-min predecessor, gamma == 0
  double preds[3];
  Step kinds[3];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == 0 && j == 0) {
        R(0, 0) = cost(0, 0);
        continue;
      }
      std::size_t k = 0;
      if (i > 0 && j > 0) { preds[k] = R(i - 1, j - 1); kinds[k++] = kDiag; }
      if (i > 0) { preds[k] = R(i - 1, j); kinds[k++] = kUp; }
      if (j > 0) { preds[k] = R(i, j - 1); kinds[k++] = kLeft; }
      if (gamma == 0.0) {
        std::size_t best = 0;
        for (std::size_t q = 1; q < k; ++q)
          if (preds[q] < preds[best]) best = q;
        step[i * m + j] = kinds[best];
        R(i, j) = cost(i, j) + preds[best];
      } else {
        R(i, j) = cost(i, j) + soft_min(std::span<const double>(preds, k), gamma);
      }
    }
  }

  SoftDtwResult result;
  result.value = R(n - 1, m - 1);
  result.grad_cost = Matrix(n, m);
  Matrix &E = result.grad_cost;

  if (gamma == 0.0) {
    std::size_t i = n - 1, j = m - 1;
    E(i, j) = 1.0;
    while (i > 0 || j > 0) {
      switch (step[i * m + j]) {
        case kDiag: --i; --j; break;
        case kUp: --i; break;
        case kLeft: --j; break;
      }
      E(i, j) = 1.0;
    }
    return result;
  }

  E(n - 1, m - 1) = 1.0;
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t jj = m; jj-- > 0;) {
      if (ii == n - 1 && jj == m - 1) continue;
      double acc = 0.0;
      auto pull = [&](std::size_t si, std::size_t sj) {
        const double w = std::exp((R(si, sj) - cost(si, sj) - R(ii, jj)) / gamma);
        acc += E(si, sj) * w;
      };
      if (ii + 1 < n) pull(ii + 1, jj);
      if (jj + 1 < m) pull(ii, jj + 1);
      if (ii + 1 < n && jj + 1 < m) pull(ii + 1, jj + 1);
      E(ii, jj) = acc;
    }
  }
  return result;
}

}  // namespace pausekit
