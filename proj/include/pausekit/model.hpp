// pausekit/model.hpp

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
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pausekit/error.hpp"
#include "pausekit/sequences.hpp"
#include "pausekit/soft_dtw.hpp"
#include "pausekit/transcript.hpp"

namespace pausekit {

inline constexpr std::size_t kNumIpClasses = 3;

/// Latent states, one row per decoder position.
using LatentMatrix = Matrix;

/// The two linear heads on top of the latent states: a transcript head
/// projecting to the vocabulary (which contains <SIL>) and a three-way
/// IP head (non-pause, appropriate, inappropriate).
struct HeadParams {
  std::vector<std::string> vocab;
  Matrix transcript_weights;  // d x |V|
  std::vector<double> transcript_bias;
  Matrix ip_weights;  // d x 3
  std::vector<double> ip_bias;

  std::size_t latent_dim() const { return transcript_weights.rows(); }
  std::size_t vocab_size() const { return vocab.size(); }

  static HeadParams zeros(std::vector<std::string> vocab, std::size_t latent_dim) {
    HeadParams p;
    const std::size_t v = vocab.size();
    p.vocab = std::move(vocab);
    p.transcript_weights = Matrix(latent_dim, v);
    p.transcript_bias.assign(v, 0.0);
    p.ip_weights = Matrix(latent_dim, kNumIpClasses);
    p.ip_bias.assign(kNumIpClasses, 0.0);
    return p;
  }

  void validate() const {
    const std::size_t v = vocab.size();
    if (v < 2) throw Error(ErrorCode::kInvariantViolation, "vocabulary needs at least two entries");
    if (std::find(vocab.begin(), vocab.end(), kPauseTag) == vocab.end())
      throw Error(ErrorCode::kInvariantViolation, "vocabulary has no <SIL> entry");
    for (const auto &w : vocab)
      if (w != kPauseTag && !word_surface_problem(w).empty())
        throw Error(ErrorCode::kInvariantViolation, "bad vocabulary entry '" + w + "'");
    const std::size_t d = transcript_weights.rows();
    if (d == 0 || transcript_weights.cols() != v || transcript_bias.size() != v ||
        ip_weights.rows() != d || ip_weights.cols() != kNumIpClasses ||
        ip_bias.size() != kNumIpClasses)
      throw Error(ErrorCode::kShapeMismatch, "head parameter shapes are inconsistent");
    auto finite = [](const std::vector<double> &xs) {
      return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
    };
    if (!finite(transcript_weights.data()) || !finite(transcript_bias) ||
        !finite(ip_weights.data()) || !finite(ip_bias))
      throw Error(ErrorCode::kInvariantViolation, "non-finite head parameter");
  }
};

struct HeadOutputs {
  Matrix transcript_logits;  // T x |V|
  Matrix ip_logits;          // T x 3
};

namespace internal {

// out = z * w + bias (broadcast over rows).
inline Matrix affine(const Matrix &z, const Matrix &w, const std::vector<double> &bias) {
  Matrix out(z.rows(), w.cols());
  for (std::size_t t = 0; t < z.rows(); ++t) {
    auto dst = out.row(t);
    std::copy(bias.begin(), bias.end(), dst.begin());
    for (std::size_t k = 0; k < z.cols(); ++k) {
      const double zk = z(t, k);
      if (zk == 0.0) continue;
      auto wk = w.row(k);
      for (std::size_t c = 0; c < w.cols(); ++c) dst[c] += zk * wk[c];
    }
  }
  return out;
}

inline std::vector<double> softmax(std::span<const double> logits) {
  const double hi = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) sum += (p[i] = std::exp(logits[i] - hi));
  for (double &x : p) x /= sum;
  return p;
}

inline std::size_t argmax_lowest(std::span<const double> xs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] > xs[best]) best = i;
  return best;
}

}  // namespace internal

inline HeadOutputs forward_heads(const LatentMatrix &z, const HeadParams &p) {
  if (z.rows() == 0 || z.cols() == 0) throw Error(ErrorCode::kShapeMismatch, "empty latent matrix");
  if (z.cols() != p.transcript_weights.rows() || z.cols() != p.ip_weights.rows() ||
      p.transcript_bias.size() != p.transcript_weights.cols() ||
      p.ip_bias.size() != p.ip_weights.cols())
    throw Error(ErrorCode::kShapeMismatch,
                "latent width " + std::to_string(z.cols()) + " vs head input " +
                    std::to_string(p.transcript_weights.rows()));
  return {internal::affine(z, p.transcript_weights, p.transcript_bias),
          internal::affine(z, p.ip_weights, p.ip_bias)};
}

struct LossWeights {
  double cross_entropy = 1.0;
  double soft_dtw = 1.0;
};

struct LossResult {
  double loss = 0.0;
  double cross_entropy = 0.0;
  double soft_dtw = 0.0;
  Matrix grad_transcript_logits;
  Matrix grad_ip_logits;
};

/// loss = mean over positions of softmax cross-entropy of the transcript
///        logits against `target_tokens`
///      + soft-DTW between the IP-head distributions and the one-hot IP
///        targets, with cost(i, j) = |softmax(ip_logits[i]) - onehot(target_ip[j])|^2.
///
/// The IP target may have a different length from the logits.
inline LossResult combined_loss(const Matrix &transcript_logits, std::span<const int> target_tokens,
                                const Matrix &ip_logits, std::span<const int> target_ip,
                                double gamma, const LossWeights &weights = {}) {
  const std::size_t T = transcript_logits.rows();
  const std::size_t V = transcript_logits.cols();
  if (T == 0 || target_tokens.empty() || target_ip.empty())
    throw Error(ErrorCode::kEmptyTarget, "empty logits or target");
  if (target_tokens.size() != T || ip_logits.rows() != T || ip_logits.cols() != kNumIpClasses)
    throw Error(ErrorCode::kShapeMismatch, "logit and target shapes disagree");
  for (int tok : target_tokens)
    if (tok < 0 || static_cast<std::size_t>(tok) >= V)
      throw Error(ErrorCode::kShapeMismatch, "target token " + std::to_string(tok) + " outside vocabulary");
  for (int c : target_ip)
    if (c < 0 || c >= static_cast<int>(kNumIpClasses))
      throw Error(ErrorCode::kShapeMismatch, "IP target " + std::to_string(c) + " outside {0,1,2}");

  LossResult r;
  r.grad_transcript_logits = Matrix(T, V);
  r.grad_ip_logits = Matrix(T, kNumIpClasses);

  const double inv_t = 1.0 / static_cast<double>(T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto p = internal::softmax(transcript_logits.row(t));
    const auto y = static_cast<std::size_t>(target_tokens[t]);
    r.cross_entropy -= std::log(std::max(p[y], 1e-300)) * inv_t;
    auto g = r.grad_transcript_logits.row(t);
    for (std::size_t v = 0; v < V; ++v)
      g[v] = weights.cross_entropy * inv_t * (p[v] - (v == y ? 1.0 : 0.0));
  }

  const std::size_t Tp = target_ip.size();
  std::vector<std::vector<double>> probs(T);
  Matrix cost(T, Tp);
  for (std::size_t i = 0; i < T; ++i) {
    probs[i] = internal::softmax(ip_logits.row(i));
    for (std::size_t j = 0; j < Tp; ++j) {
      double c = 0.0;
      for (std::size_t k = 0; k < kNumIpClasses; ++k) {
        const double diff = probs[i][k] - (static_cast<int>(k) == target_ip[j] ? 1.0 : 0.0);
        c += diff * diff;
      }
      cost(i, j) = c;
    }
  }
  const auto sdtw = soft_dtw(cost, gamma);
  r.soft_dtw = sdtw.value;

  for (std::size_t i = 0; i < T; ++i) {
    // d sdtw / d p_i = sum_j E(i,j) * 2 (p_i - onehot(y_j))
    double g_p[kNumIpClasses] = {0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < Tp; ++j) {
      const double e = sdtw.grad_cost(i, j);
      if (e == 0.0) continue;
      for (std::size_t k = 0; k < kNumIpClasses; ++k)
        g_p[k] += 2.0 * e * (probs[i][k] - (static_cast<int>(k) == target_ip[j] ? 1.0 : 0.0));
    }
    double dot = 0.0;
    for (std::size_t k = 0; k < kNumIpClasses; ++k) dot += g_p[k] * probs[i][k];
    auto g = r.grad_ip_logits.row(i);
    for (std::size_t k = 0; k < kNumIpClasses; ++k)
      g[k] = weights.soft_dtw * probs[i][k] * (g_p[k] - dot);
  }

  r.loss = weights.cross_entropy * r.cross_entropy + weights.soft_dtw * r.soft_dtw;
  return r;
}

/// Chains logit gradients back through forward_heads. The result has the
/// shapes of `p` and carries its vocabulary.
inline HeadParams head_gradients(const LatentMatrix &z, const HeadParams &p,
                                 const Matrix &grad_transcript_logits, const Matrix &grad_ip_logits) {
  HeadParams g = HeadParams::zeros(p.vocab, z.cols());
  auto accumulate = [&](const Matrix &grad_logits, Matrix &gw, std::vector<double> &gb) {
    for (std::size_t t = 0; t < z.rows(); ++t) {
      auto gl = grad_logits.row(t);
      for (std::size_t c = 0; c < gl.size(); ++c) gb[c] += gl[c];
      for (std::size_t k = 0; k < z.cols(); ++k) {
        const double zk = z(t, k);
        if (zk == 0.0) continue;
        auto row = gw.row(k);
        for (std::size_t c = 0; c < gl.size(); ++c) row[c] += zk * gl[c];
      }
    }
  };
  accumulate(grad_transcript_logits, g.transcript_weights, g.transcript_bias);
  accumulate(grad_ip_logits, g.ip_weights, g.ip_bias);
  return g;
}

struct DecodedPrediction {
  TaggedTranscript transcript;
  std::vector<int> head_labels;  // one per transcript token
};

/// Per-position argmax (ties to the lowest index) over the vocabulary and
/// over the IP classes. Consecutive <SIL> predictions collapse into one
/// pause token whose head label is the largest label in the run.
inline DecodedPrediction decode_predictions(const Matrix &transcript_logits, const Matrix &ip_logits,
                                            std::span<const std::string> vocab) {
  if (transcript_logits.cols() != vocab.size() || ip_logits.cols() != kNumIpClasses ||
      ip_logits.rows() != transcript_logits.rows())
    throw Error(ErrorCode::kShapeMismatch, "logit shapes do not match the vocabulary");
  std::vector<Token> tokens;
  std::vector<int> labels;
  for (std::size_t t = 0; t < transcript_logits.rows(); ++t) {
    const auto &surface = vocab[internal::argmax_lowest(transcript_logits.row(t))];
    const int label = static_cast<int>(internal::argmax_lowest(ip_logits.row(t)));
    if (surface == kPauseTag) {
      if (!tokens.empty() && tokens.back().is_pause()) {
        labels.back() = std::max(labels.back(), label);
        continue;
      }
      tokens.push_back(Token::pause());
    } else {
      tokens.push_back(Token::word(surface));
    }
    labels.push_back(label);
  }
  return {TaggedTranscript(std::move(tokens)), std::move(labels)};
}

// ---------------------------------------------------------------------------
// JSON: matrices are {"rows": r, "cols": c, "data": [row-major values]}.

inline nlohmann::json matrix_to_json(const Matrix &m) {
  return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

inline Matrix matrix_from_json(const nlohmann::json &j) {
  try {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("matrix: ") + e.what());
  }
}

inline nlohmann::json params_to_json(const HeadParams &p) {
  return nlohmann::json{{"vocab", p.vocab},
                        {"transcript_weights", matrix_to_json(p.transcript_weights)},
                        {"transcript_bias", p.transcript_bias},
                        {"ip_weights", matrix_to_json(p.ip_weights)},
                        {"ip_bias", p.ip_bias}};
}

inline HeadParams params_from_json(const nlohmann::json &j) {
  HeadParams p;
  try {
    p.vocab = j.at("vocab").get<std::vector<std::string>>();
    p.transcript_weights = matrix_from_json(j.at("transcript_weights"));
    p.transcript_bias = j.at("transcript_bias").get<std::vector<double>>();
    p.ip_weights = matrix_from_json(j.at("ip_weights"));
    p.ip_bias = j.at("ip_bias").get<std::vector<double>>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("head params: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace pausekit
