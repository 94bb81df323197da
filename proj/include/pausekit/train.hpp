// pausekit/train.hpp

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
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "pausekit/error.hpp"
#include "pausekit/metrics.hpp"
#include "pausekit/model.hpp"
#include "pausekit/sequences.hpp"

namespace pausekit {

struct ToyExample {
  LatentMatrix latents;            // T x d
  std::vector<int> target_tokens;  // T vocabulary indices
  std::vector<int> target_ip;      // soft-DTW target, length may differ from T
  std::vector<int> token_ip;       // per-token IP labels for scoring; empty if unknown
};

struct ToyCorpus {
  std::vector<std::string> vocab;
  std::vector<ToyExample> examples;
};

/// Synthetic corpus whose latents are a linear function of the targets:
/// each position is token_prototype[token] + ip_prototype[label] + noise.
/// Prototypes depend only on prototype_seed, so corpora drawn with
/// different sample_seed values share structure (train vs held-out).
struct PlantedCorpusConfig {
  std::size_t utterances = 32;
  std::size_t vocab_words = 7;  // word entries besides <SIL>
  std::size_t latent_dim = 16;
  std::size_t min_words = 4;
  std::size_t max_words = 8;
  double pause_prob = 0.35;        // chance of a pause after each non-final word
  double inappropriate_prob = 0.5; // share of pauses labeled 2
  double latent_scale = 8.0;       // prototype norm
  double noise = 0.05;
  std::size_t pad_every = 4;       // every k-th example gets a padded IP target; 0 = never
  std::uint64_t prototype_seed = 1;
  std::uint64_t sample_seed = 2;
};

inline ToyCorpus make_planted_corpus(const PlantedCorpusConfig &cfg) {
  if (cfg.utterances == 0) throw Error(ErrorCode::kEmptyCorpus, "planted corpus with no utterances");
  if (cfg.min_words == 0 || cfg.max_words < cfg.min_words || cfg.vocab_words == 0 ||
      cfg.latent_dim == 0)
    throw Error(ErrorCode::kInvalidArgument, "bad planted corpus configuration");

  ToyCorpus corpus;
  corpus.vocab.emplace_back(kPauseTag);
  for (std::size_t w = 0; w < cfg.vocab_words; ++w) corpus.vocab.push_back("w" + std::to_string(w));
  const std::size_t V = corpus.vocab.size(), d = cfg.latent_dim;

  std::mt19937_64 proto_rng(cfg.prototype_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_direction = [&](std::mt19937_64 &rng) {
    std::vector<double> v(d);
    double norm = 0.0;
    for (double &x : v) {
      x = normal(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double &x : v) x *= cfg.latent_scale / norm;
    return v;
  };
  std::vector<std::vector<double>> token_proto(V), ip_proto(kNumIpClasses);
  for (auto &p : token_proto) p = random_direction(proto_rng);
  for (auto &p : ip_proto) p = random_direction(proto_rng);

  std::mt19937_64 rng(cfg.sample_seed);
  std::uniform_int_distribution<std::size_t> n_words(cfg.min_words, cfg.max_words);
  std::uniform_int_distribution<int> word_id(1, static_cast<int>(V) - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, cfg.noise);

  for (std::size_t u = 0; u < cfg.utterances; ++u) {
    ToyExample ex;
    const std::size_t words = n_words(rng);
    for (std::size_t w = 0; w < words; ++w) {
      ex.target_tokens.push_back(word_id(rng));
      ex.token_ip.push_back(kNonPause);
      if (w + 1 < words && unit(rng) < cfg.pause_prob) {
        ex.target_tokens.push_back(0);
        ex.token_ip.push_back(unit(rng) < cfg.inappropriate_prob ? kInappropriatePause
                                                                  : kAppropriatePause);
      }
    }
    const std::size_t T = ex.target_tokens.size();
    ex.latents = Matrix(T, d);
    for (std::size_t t = 0; t < T; ++t) {
      const auto &tp = token_proto[static_cast<std::size_t>(ex.target_tokens[t])];
      const auto &ip = ip_proto[static_cast<std::size_t>(ex.token_ip[t])];
      for (std::size_t k = 0; k < d; ++k) ex.latents(t, k) = tp[k] + ip[k] + jitter(rng);
    }
    ex.target_ip = ex.token_ip;
    // Utterances end in a word, so a trailing 0 aligns with the last row.
    if (cfg.pad_every > 0 && u % cfg.pad_every == cfg.pad_every - 1) ex.target_ip.push_back(kNonPause);
    corpus.examples.push_back(std::move(ex));
  }
  return corpus;
}

struct TrainConfig {
  double learning_rate = 5e-4;  // peak rate, decayed linearly to 0
  std::size_t batch_size = 8;
  std::size_t steps = 200;
  double gamma = 0.1;  // soft-DTW smoothing
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double init_scale = 0.01;
  LossWeights loss_weights;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning_rate must be >= 0");
    if (!(gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be > 0");
    if (batch_size == 0) throw Error(ErrorCode::kInvalidArgument, "batch_size must be positive");
    if (!(weight_decay >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "weight_decay must be >= 0");
  }

  double rate_at(std::size_t step) const {
    return learning_rate * (1.0 - static_cast<double>(step) / static_cast<double>(steps));
  }
};

namespace internal {

template <typename Params, typename Fn>
void for_each_array(Params &p, Fn &&fn) {
  fn(p.transcript_weights.data());
  fn(p.transcript_bias);
  fn(p.ip_weights.data());
  fn(p.ip_bias);
}

template <typename Fn>
void for_each_array_pair(HeadParams &a, const HeadParams &b, Fn &&fn) {
  fn(a.transcript_weights.data(), b.transcript_weights.data());
  fn(a.transcript_bias, b.transcript_bias);
  fn(a.ip_weights.data(), b.ip_weights.data());
  fn(a.ip_bias, b.ip_bias);
}

}  // namespace internal

// Adam with decoupled weight decay.
class AdamW {
 public:
  explicit AdamW(const HeadParams &shape) : m_(zeros_like(shape)), v_(zeros_like(shape)) {}

  void step(HeadParams &params, const HeadParams &grad, double lr, const TrainConfig &cfg) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
    std::size_t which = 0;
    std::vector<std::vector<double> *> ms, vs;
    internal::for_each_array(m_, [&](std::vector<double> &x) { ms.push_back(&x); });
    internal::for_each_array(v_, [&](std::vector<double> &x) { vs.push_back(&x); });
    internal::for_each_array_pair(params, grad, [&](std::vector<double> &w, const std::vector<double> &g) {
      auto &m = *ms[which];
      auto &v = *vs[which];
      ++which;
      for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        const double m_hat = m[i] / bc1;
        const double v_hat = v[i] / bc2;
        w[i] -= lr * cfg.weight_decay * w[i];
        w[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
      }
    });
  }

 private:
  static HeadParams zeros_like(const HeadParams &p) {
    return HeadParams::zeros(p.vocab, p.latent_dim());
  }

  HeadParams m_, v_;
  std::size_t t_ = 0;
};

inline LossResult example_loss(const ToyExample &ex, const HeadParams &p, const TrainConfig &cfg) {
  const auto out = forward_heads(ex.latents, p);
  return combined_loss(out.transcript_logits, ex.target_tokens, out.ip_logits, ex.target_ip,
                       cfg.gamma, cfg.loss_weights);
}

inline double corpus_loss(const ToyCorpus &corpus, const HeadParams &p, const TrainConfig &cfg) {
  double total = 0.0;
  for (const auto &ex : corpus.examples) total += example_loss(ex, p, cfg).loss;
  return total / static_cast<double>(corpus.examples.size());
}

struct TraceRow {
  std::size_t step = 0;
  double learning_rate = 0.0;
  double batch_loss = 0.0;   // minibatch mean before the update
  double corpus_loss = 0.0;  // whole corpus before the update
};

struct TrainResult {
  HeadParams params;
  std::vector<TraceRow> trace;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

inline HeadParams initial_params(const ToyCorpus &corpus, const TrainConfig &cfg) {
  auto p = HeadParams::zeros(corpus.vocab, corpus.examples.front().latents.cols());
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, cfg.init_scale);
  for (double &w : p.transcript_weights.data()) w = normal(rng);
  for (double &w : p.ip_weights.data()) w = normal(rng);
  return p;
}

/// Minibatch AdamW on the two heads with fixed latents. Batches come from
/// a per-epoch shuffle driven by cfg.seed, so runs are reproducible.
inline TrainResult train_toy(const ToyCorpus &corpus, const TrainConfig &cfg) {
  cfg.validate();
  if (corpus.examples.empty()) throw Error(ErrorCode::kEmptyCorpus, "nothing to train on");

  TrainResult result;
  result.params = initial_params(corpus, cfg);
  result.params.validate();
  AdamW opt(result.params);

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(corpus.examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();

  result.initial_loss = corpus_loss(corpus, result.params, cfg);
  double current = result.initial_loss;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    HeadParams grad = HeadParams::zeros(result.params.vocab, result.params.latent_dim());
    double batch_loss = 0.0;
    std::size_t batch = 0;
    for (; batch < cfg.batch_size; ++batch) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const auto &ex = corpus.examples[order[cursor++]];
      const auto loss = example_loss(ex, result.params, cfg);
      batch_loss += loss.loss;
      const auto g = head_gradients(ex.latents, result.params, loss.grad_transcript_logits,
                                    loss.grad_ip_logits);
      internal::for_each_array_pair(grad, g, [](std::vector<double> &acc, const std::vector<double> &x) {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += x[i];
      });
    }
    const double scale = 1.0 / static_cast<double>(batch);
    internal::for_each_array(grad, [&](std::vector<double> &x) {
      for (double &v : x) v *= scale;
    });
    const double lr = cfg.rate_at(step);
    result.trace.push_back({step, lr, batch_loss * scale, current});
    opt.step(result.params, grad, lr, cfg);
    current = corpus_loss(corpus, result.params, cfg);
  }
  result.final_loss = current;
  return result;
}

struct ToyEvaluation {
  EditCounts pause;
  EditCounts ip;
  std::size_t coerced_pauses = 0;
};

/// Decodes every example and scores PauER / IPER against its targets.
inline ToyEvaluation evaluate_toy(const ToyCorpus &corpus, const HeadParams &p) {
  ToyEvaluation ev;
  for (const auto &ex : corpus.examples) {
    std::vector<Token> ref_tokens;
    for (int tok : ex.target_tokens)
      ref_tokens.push_back(corpus.vocab[static_cast<std::size_t>(tok)] == kPauseTag
                               ? Token::pause()
                               : Token::word(corpus.vocab[static_cast<std::size_t>(tok)]));
    const TaggedTranscript ref(std::move(ref_tokens));
    const auto &ref_ip = ex.token_ip.empty() ? ex.target_ip : ex.token_ip;

    const auto out = forward_heads(ex.latents, p);
    const auto dec = decode_predictions(out.transcript_logits, out.ip_logits, p.vocab);
    const auto pred = predicted_ip_seq(dec.transcript, dec.head_labels);
    ev.pause += edit_counts(to_pause_seq(ref).bits, to_pause_seq(dec.transcript).bits);
    ev.ip += edit_counts(ref_ip, pred.seq.codes);
    ev.coerced_pauses += pred.coerced_pauses;
  }
  return ev;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json corpus_to_json(const ToyCorpus &c) {
  nlohmann::json examples = nlohmann::json::array();
  for (const auto &ex : c.examples) {
    nlohmann::json j{{"latents", matrix_to_json(ex.latents)},
                     {"target_tokens", ex.target_tokens},
                     {"target_ip", ex.target_ip}};
    if (!ex.token_ip.empty()) j["token_ip"] = ex.token_ip;
    examples.push_back(std::move(j));
  }
  return nlohmann::json{{"vocab", c.vocab}, {"examples", std::move(examples)}};
}

inline ToyCorpus corpus_from_json(const nlohmann::json &j) {
  ToyCorpus c;
  try {
    c.vocab = j.at("vocab").get<std::vector<std::string>>();
    for (const auto &e : j.at("examples")) {
      ToyExample ex;
      ex.latents = matrix_from_json(e.at("latents"));
      ex.target_tokens = e.at("target_tokens").get<std::vector<int>>();
      ex.target_ip = e.at("target_ip").get<std::vector<int>>();
      if (e.contains("token_ip")) ex.token_ip = e["token_ip"].get<std::vector<int>>();
      c.examples.push_back(std::move(ex));
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("toy corpus: ") + e.what());
  }
  if (c.examples.empty()) throw Error(ErrorCode::kEmptyCorpus, "toy corpus has no examples");
  const std::size_t d = c.examples.front().latents.cols();
  for (const auto &ex : c.examples)
    if (ex.latents.cols() != d || ex.latents.rows() != ex.target_tokens.size())
      throw Error(ErrorCode::kShapeMismatch, "toy example shapes disagree");
  return c;
}

}  // namespace pausekit
