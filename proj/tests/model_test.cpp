// tests/model_test.cpp

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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pausekit/model.hpp"

namespace pausekit {
namespace {

std::vector<std::string> vocab3() { return {"<SIL>", "가", "나"}; }

Matrix random_matrix(std::mt19937 &rng, std::size_t r, std::size_t c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (auto &x : m.data()) x = n(rng);
  return m;
}

HeadParams random_params(std::mt19937 &rng, std::vector<std::string> vocab, std::size_t d) {
  auto p = HeadParams::zeros(std::move(vocab), d);
  p.transcript_weights = random_matrix(rng, d, p.vocab_size());
  p.ip_weights = random_matrix(rng, d, kNumIpClasses);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto &b : p.transcript_bias) b = n(rng);
  for (auto &b : p.ip_bias) b = n(rng);
  return p;
}

std::vector<std::vector<double>> rows_of(const Matrix &m) {
  std::vector<std::vector<double>> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out[r].assign(m.row(r).begin(), m.row(r).end());
  return out;
}

TEST(ForwardHeads, ZeroWeightsGiveBias) {
  auto p = HeadParams::zeros(vocab3(), 4);
  p.transcript_bias = {1, 2, 3};
  p.ip_bias = {-1, 0, 1};
  const auto out = forward_heads(Matrix(2, 4, 5.0), p);
  for (std::size_t t = 0; t < 2; ++t) {
    EXPECT_EQ(rows_of(out.transcript_logits)[t], (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(rows_of(out.ip_logits)[t], (std::vector<double>{-1, 0, 1}));
  }
}

TEST(ForwardHeads, IdentityWeights) {
  auto p = HeadParams::zeros(vocab3(), 3);
  for (std::size_t i = 0; i < 3; ++i) p.transcript_weights(i, i) = p.ip_weights(i, i) = 1.0;
  const Matrix z(1, 3, std::vector<double>{0.5, -2, 7});
  EXPECT_EQ(forward_heads(z, p).transcript_logits, z);
}

TEST(ForwardHeads, MatchesNaiveProduct) {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + trial % 7, t = 1 + trial % 5;
    const auto p = random_params(rng, vocab3(), d);
    const auto z = random_matrix(rng, t, d);
    const auto out = forward_heads(z, p);
    const auto expect = oracle::affine(rows_of(z), rows_of(p.ip_weights), p.ip_bias);
    const auto got = rows_of(out.ip_logits);
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t c = 0; c < kNumIpClasses; ++c) EXPECT_NEAR(got[i][c], expect[i][c], 1e-12);
  }
}

TEST(ForwardHeads, ShapeErrors) {
  const auto p = HeadParams::zeros(vocab3(), 4);
  try {
    forward_heads(Matrix(2, 3), p);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  EXPECT_THROW(forward_heads(Matrix(0, 4), p), Error);
}

TEST(CombinedLoss, UniformLogitsGiveLogVocab) {
  const std::vector<int> tokens = {0, 1, 2, 1}, ip = {0, 1, 0, 0};
  const auto r = combined_loss(Matrix(4, 3), tokens, Matrix(4, 3), ip, 0.0);
  EXPECT_NEAR(r.cross_entropy, std::log(3.0), 1e-12);
}

TEST(CombinedLoss, ConfidentCorrectPredictionIsNearZero) {
  const std::vector<int> tokens = {1, 0, 2}, ip = {0, 2, 0};
  Matrix tl(3, 3), il(3, 3);
  for (std::size_t t = 0; t < 3; ++t) {
    tl(t, tokens[t]) = 60.0;
    il(t, ip[t]) = 60.0;
  }
  const auto r = combined_loss(tl, tokens, il, ip, 0.0);
  EXPECT_NEAR(r.loss, 0.0, 1e-12);
  EXPECT_GE(r.loss, 0.0);
}

TEST(CombinedLoss, CrossEntropyIgnoresRowShift) {
  std::mt19937 rng(12);
  const std::vector<int> tokens = {2, 0, 1}, ip = {0, 1, 0};
  const auto tl = random_matrix(rng, 3, 3), il = random_matrix(rng, 3, 3);
  Matrix shifted = tl;
  for (std::size_t t = 0; t < 3; ++t)
    for (auto &x : shifted.row(t)) x += 10.0 * (t + 1);
  EXPECT_NEAR(combined_loss(tl, tokens, il, ip, 0.3).cross_entropy,
              combined_loss(shifted, tokens, il, ip, 0.3).cross_entropy, 1e-12);
}

TEST(CombinedLoss, CrossEntropyEquivariantUnderVocabPermutation) {
  std::mt19937 rng(13);
  const std::vector<int> tokens = {2, 0, 1, 1}, ip = {0, 1};
  const auto tl = random_matrix(rng, 4, 3), il = random_matrix(rng, 4, 3);
  const int perm[3] = {2, 0, 1};
  Matrix permuted(4, 3);
  std::vector<int> permuted_tokens;
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t v = 0; v < 3; ++v) permuted(t, perm[v]) = tl(t, v);
    permuted_tokens.push_back(perm[tokens[t]]);
  }
  EXPECT_NEAR(combined_loss(tl, tokens, il, ip, 1.0).cross_entropy,
              combined_loss(permuted, permuted_tokens, il, ip, 1.0).cross_entropy, 1e-12);
}

TEST(CombinedLoss, Errors) {
  const std::vector<int> none, one = {0};
  try {
    combined_loss(Matrix(1, 3), one, Matrix(1, 3), none, 1.0);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTarget);
  }
  const std::vector<int> two = {0, 1};
  EXPECT_THROW(combined_loss(Matrix(1, 3), two, Matrix(1, 3), one, 1.0), Error);
  const std::vector<int> bad = {5};
  EXPECT_THROW(combined_loss(Matrix(1, 3), bad, Matrix(1, 3), one, 1.0), Error);
}

// Flattens head parameters into one vector and back, for finite differences.
std::vector<double> flatten(const HeadParams &p) {
  std::vector<double> x = p.transcript_weights.data();
  x.insert(x.end(), p.transcript_bias.begin(), p.transcript_bias.end());
  x.insert(x.end(), p.ip_weights.data().begin(), p.ip_weights.data().end());
  x.insert(x.end(), p.ip_bias.begin(), p.ip_bias.end());
  return x;
}
HeadParams unflatten(const HeadParams &shape, const std::vector<double> &x) {
  HeadParams p = shape;
  auto it = x.begin();
  auto take = [&](std::vector<double> &dst) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
    it += static_cast<std::ptrdiff_t>(dst.size());
  };
  take(p.transcript_weights.data());
  take(p.transcript_bias);
  take(p.ip_weights.data());
  take(p.ip_bias);
  return p;
}

TEST(CombinedLossProperties, AnalyticGradientMatchesFiniteDifferences) {
  std::mt19937 rng(77);
  std::uniform_int_distribution<std::size_t> len(1, 6), dim(1, 8), vsize(2, 10);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t T = len(rng), Tp = len(rng), d = dim(rng), V = vsize(rng);
    std::vector<std::string> vocab = {"<SIL>"};
    for (std::size_t v = 1; v < V; ++v) vocab.push_back("w" + std::to_string(v));
    const auto p = random_params(rng, vocab, d);
    const auto z = random_matrix(rng, T, d);
    std::vector<int> tokens(T), ip(Tp);
    for (auto &t : tokens) t = static_cast<int>(rng() % V);
    for (auto &c : ip) c = static_cast<int>(rng() % 3);
    const double gamma = trial % 2 ? 1.0 : 0.1;

    auto loss_at = [&](const std::vector<double> &x) {
      const auto out = forward_heads(z, unflatten(p, x));
      return combined_loss(out.transcript_logits, tokens, out.ip_logits, ip, gamma).loss;
    };
    const auto out = forward_heads(z, p);
    const auto r = combined_loss(out.transcript_logits, tokens, out.ip_logits, ip, gamma);
    const auto analytic = flatten(head_gradients(z, p, r.grad_transcript_logits, r.grad_ip_logits));
    const auto numeric = oracle::numeric_gradient(loss_at, flatten(p));
    EXPECT_LE(oracle::relative_error(analytic, numeric), 1e-4) << "trial " << trial;
  }
}

TEST(DecodePredictions, MergesPauseRunsWithMaxLabel) {
  const auto v = vocab3();
  // argmax tokens: 가 <SIL> <SIL> 나 ; IP argmax: 0 1 2 0
  Matrix tl(4, 3), il(4, 3);
  tl(0, 1) = tl(1, 0) = tl(2, 0) = tl(3, 2) = 1.0;
  il(0, 0) = il(1, 1) = il(2, 2) = il(3, 0) = 1.0;
  const auto d = decode_predictions(tl, il, v);
  EXPECT_EQ(serialize(d.transcript), "가 <SIL> 나");
  EXPECT_EQ(d.head_labels, (std::vector<int>{0, 2, 0}));
}

TEST(DecodePredictions, TiesGoToLowestIndex) {
  const auto d = decode_predictions(Matrix(1, 3), Matrix(1, 3), vocab3());
  EXPECT_EQ(serialize(d.transcript), "<SIL>");
  EXPECT_EQ(d.head_labels, (std::vector<int>{0}));
}

TEST(HeadParamsJson, RoundTrip) {
  std::mt19937 rng(2);
  const auto p = random_params(rng, vocab3(), 5);
  const auto q = params_from_json(nlohmann::json::parse(params_to_json(p).dump()));
  EXPECT_EQ(q.vocab, p.vocab);
  EXPECT_EQ(q.transcript_weights, p.transcript_weights);
  EXPECT_EQ(q.ip_bias, p.ip_bias);
  auto broken = params_to_json(p);
  broken["ip_bias"] = {1.0};
  EXPECT_THROW(params_from_json(broken), Error);
  broken = params_to_json(p);
  broken["vocab"] = {"a", "b", "c"};
  EXPECT_THROW(params_from_json(broken), Error);
}

}  // namespace
}  // namespace pausekit
