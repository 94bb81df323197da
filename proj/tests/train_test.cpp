// tests/train_test.cpp

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

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "pausekit/train.hpp"

namespace pausekit {
namespace {

// Least-squares fit from latents (plus a bias column) to one-hot targets.
// Perfect argmax recovery means a linear head can separate the classes.
double linear_probe_accuracy(const ToyCorpus &c, bool ip) {
  std::size_t rows = 0;
  for (const auto &ex : c.examples) rows += ex.latents.rows();
  const std::size_t d = c.examples.front().latents.cols();
  const std::size_t k = ip ? kNumIpClasses : c.vocab.size();
  Eigen::MatrixXd X(rows, d + 1), Y = Eigen::MatrixXd::Zero(rows, k);
  std::vector<int> labels;
  std::size_t r = 0;
  for (const auto &ex : c.examples)
    for (std::size_t t = 0; t < ex.latents.rows(); ++t, ++r) {
      for (std::size_t j = 0; j < d; ++j) X(r, j) = ex.latents(t, j);
      X(r, d) = 1.0;
      const int y = ip ? ex.token_ip[t] : ex.target_tokens[t];
      Y(r, y) = 1.0;
      labels.push_back(y);
    }
  const Eigen::MatrixXd W = X.colPivHouseholderQr().solve(Y);
  const Eigen::MatrixXd P = X * W;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    Eigen::Index best;
    P.row(i).maxCoeff(&best);
    hits += best == labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(rows);
}

TEST(PlantedCorpus, Shape) {
  const auto c = make_planted_corpus({});
  EXPECT_EQ(c.vocab.front(), "<SIL>");
  EXPECT_EQ(c.vocab.size(), 8u);
  EXPECT_EQ(c.examples.size(), 32u);
  std::size_t padded = 0, pauses = 0;
  for (const auto &ex : c.examples) {
    EXPECT_EQ(ex.latents.rows(), ex.target_tokens.size());
    EXPECT_EQ(ex.token_ip.size(), ex.target_tokens.size());
    padded += ex.target_ip.size() != ex.token_ip.size();
    for (std::size_t t = 0; t < ex.target_tokens.size(); ++t) {
      EXPECT_EQ(ex.target_tokens[t] == 0, ex.token_ip[t] != 0);
      pauses += ex.target_tokens[t] == 0;
    }
  }
  EXPECT_EQ(padded, 8u);
  EXPECT_GT(pauses, 0u);
}

TEST(PlantedCorpus, LinearlySeparable) {
  const auto c = make_planted_corpus({});
  EXPECT_DOUBLE_EQ(linear_probe_accuracy(c, false), 1.0);
  EXPECT_DOUBLE_EQ(linear_probe_accuracy(c, true), 1.0);
}

TEST(PlantedCorpus, JsonRoundTrip) {
  PlantedCorpusConfig cfg;
  cfg.utterances = 3;
  const auto c = make_planted_corpus(cfg);
  const auto back = corpus_from_json(nlohmann::json::parse(corpus_to_json(c).dump()));
  EXPECT_EQ(back.vocab, c.vocab);
  ASSERT_EQ(back.examples.size(), 3u);
  EXPECT_EQ(back.examples[2].latents, c.examples[2].latents);
  EXPECT_EQ(back.examples[2].target_ip, c.examples[2].target_ip);
}

TEST(TrainConfig, LinearDecay) {
  TrainConfig cfg;
  EXPECT_DOUBLE_EQ(cfg.rate_at(0), 5e-4);
  EXPECT_DOUBLE_EQ(cfg.rate_at(100), 2.5e-4);
  cfg.gamma = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(TrainToy, ReducesLossAndRecoversPauses) {
  const auto train = make_planted_corpus({});
  PlantedCorpusConfig held_cfg;
  held_cfg.sample_seed = 99;
  const auto held = make_planted_corpus(held_cfg);

  const auto result = train_toy(train, TrainConfig{});
  ASSERT_EQ(result.trace.size(), 200u);
  EXPECT_LE(result.final_loss, 0.5 * result.initial_loss);
  EXPECT_DOUBLE_EQ(result.trace.front().corpus_loss, result.initial_loss);

  const auto ev = evaluate_toy(held, result.params);
  EXPECT_LE(ev.pause.rate(), 0.05);
  EXPECT_LE(ev.ip.rate(), 0.05);
}

TEST(TrainToy, Deterministic) {
  PlantedCorpusConfig small;
  small.utterances = 8;
  const auto c = make_planted_corpus(small);
  TrainConfig cfg;
  cfg.steps = 20;
  const auto a = train_toy(c, cfg), b = train_toy(c, cfg);
  EXPECT_EQ(a.params.ip_weights, b.params.ip_weights);
  EXPECT_EQ(a.final_loss, b.final_loss);
}

TEST(TrainToy, ZeroLearningRateKeepsLossConstant) {
  PlantedCorpusConfig small;
  small.utterances = 5;
  const auto c = make_planted_corpus(small);
  TrainConfig cfg;
  cfg.steps = 10;
  cfg.learning_rate = 0.0;
  const auto r = train_toy(c, cfg);
  for (const auto &row : r.trace) EXPECT_EQ(row.corpus_loss, r.initial_loss);
  EXPECT_EQ(r.final_loss, r.initial_loss);
}

TEST(TrainToy, EmptyCorpus) {
  try {
    train_toy(ToyCorpus{{"<SIL>", "a"}, {}}, TrainConfig{});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
}

}  // namespace
}  // namespace pausekit
