// pausekit/sequences.hpp

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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pausekit/error.hpp"
#include "pausekit/labeling.hpp"
#include "pausekit/transcript.hpp"

namespace pausekit {

// Transcript-level evaluation sequences. Both carry one entry per token
// and are independent of which words were recognized.

struct PauseSeq {
  std::vector<int> bits;  // 1 at pause tokens, 0 elsewhere
  friend bool operator==(const PauseSeq &, const PauseSeq &) = default;
};

struct IPSeq {
  std::vector<int> codes;  // 0 word, 1 appropriate pause, 2 inappropriate pause
  friend bool operator==(const IPSeq &, const IPSeq &) = default;
};

inline PauseSeq to_pause_seq(const TaggedTranscript &t) {
  PauseSeq s;
  s.bits.reserve(t.size());
  for (const auto &tok : t.tokens()) s.bits.push_back(tok.is_pause() ? 1 : 0);
  return s;
}

inline IPSeq to_ip_seq(const TaggedTranscript &t, const IPAnnotation &a) {
  const auto problems = annotation_problems(t, a.labels);
  if (!problems.empty()) throw Error(ErrorCode::kInvariantViolation, problems.front().message);
  return IPSeq{a.labels};
}

struct PredictedIPSeq {
  IPSeq seq;
  std::size_t coerced_pauses = 0;  // pause positions where the head said 0
  std::size_t forced_words = 0;    // word positions where the head said 1 or 2
};

/// Reconciles IP-head output with the decoded transcript: the transcript
/// decides where pauses are, the head decides which kind.
inline PredictedIPSeq predicted_ip_seq(const TaggedTranscript &t, std::span<const int> head_labels) {
  if (head_labels.size() != t.size())
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(head_labels.size()) + " head labels for " +
                    std::to_string(t.size()) + " tokens");
  PredictedIPSeq out;
  out.seq.codes.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const int h = head_labels[i];
    if (h < 0 || h > 2)
      throw Error(ErrorCode::kInvalidArgument, "head label " + std::to_string(h) + " out of range");
    if (t[i].is_word()) {
      if (h != kNonPause) ++out.forced_words;
      out.seq.codes.push_back(kNonPause);
    } else if (h == kNonPause) {
      ++out.coerced_pauses;
      out.seq.codes.push_back(kAppropriatePause);
    } else {
      out.seq.codes.push_back(h);
    }
  }
  return out;
}

}  // namespace pausekit
