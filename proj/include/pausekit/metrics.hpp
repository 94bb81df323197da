// pausekit/metrics.hpp

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
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pausekit/error.hpp"
#include "pausekit/labeling.hpp"
#include "pausekit/parallel.hpp"
#include "pausekit/sequences.hpp"
#include "pausekit/transcript.hpp"

namespace pausekit {

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_len = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }

  // (S + D + I) / ref_len. Not clipped at 1.
  double rate() const {
    if (ref_len == 0) throw Error(ErrorCode::kEmptyReference, "error rate of an empty reference");
    return static_cast<double>(errors()) / static_cast<double>(ref_len);
  }
  std::optional<double> rate_if_defined() const {
    if (ref_len == 0) return std::nullopt;
    return rate();
  }

  EditCounts &operator+=(const EditCounts &o) {
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    ref_len += o.ref_len;
    return *this;
  }
  friend EditCounts operator+(EditCounts a, const EditCounts &b) { return a += b; }
  friend bool operator==(const EditCounts &, const EditCounts &) = default;
};

/// Unit-cost Levenshtein alignment of `hyp` against `ref`, with per-class
/// counts read off one optimal backtrace. The backtrace prefers the
/// diagonal (match or substitution), then deletion, then insertion, so
/// the split between S, D and I is deterministic. An empty reference is
/// allowed here; only rate() rejects it.
template <typename T>
EditCounts edit_counts(std::span<const T> ref, std::span<const T> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  const std::size_t width = m + 1;
  std::vector<std::size_t> dist((n + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t & { return dist[i * width + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditCounts c;
  c.ref_len = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++c.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

template <typename T>
EditCounts edit_counts(const std::vector<T> &ref, const std::vector<T> &hyp) {
  return edit_counts(std::span<const T>(ref), std::span<const T>(hyp));
}

// Decodes UTF-8 into code points. A byte that does not start a
// well-formed sequence is kept as its own symbol.
inline std::vector<char32_t> utf8_code_points(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xC0 && b0 < 0xE0) { len = 2; cp = b0 & 0x1F; }
    else if (b0 >= 0xE0 && b0 < 0xF0) { len = 3; cp = b0 & 0x0F; }
    else if (b0 >= 0xF0 && b0 < 0xF8) { len = 4; cp = b0 & 0x07; }
    bool ok = len == 1 || i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) ok = false;
      else cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) { len = 1; cp = b0; }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline std::vector<std::string> word_symbols(const TaggedTranscript &t) {
  std::vector<std::string> words;
  for (auto w : split_whitespace(strip_pause_tags(t))) words.emplace_back(w);
  return words;
}

// Characters of the tag-stripped text with all whitespace removed.
inline std::vector<char32_t> char_symbols(const TaggedTranscript &t) {
  std::vector<char32_t> chars;
  for (char32_t c : utf8_code_points(strip_pause_tags(t)))
    if (!(c < 0x80 && is_space_char(static_cast<char>(c)))) chars.push_back(c);
  return chars;
}

inline EditCounts word_edit_counts(const TaggedTranscript &ref, const TaggedTranscript &hyp) {
  return edit_counts(word_symbols(ref), word_symbols(hyp));
}
inline EditCounts char_edit_counts(const TaggedTranscript &ref, const TaggedTranscript &hyp) {
  return edit_counts(char_symbols(ref), char_symbols(hyp));
}

inline double wer(const TaggedTranscript &ref, const TaggedTranscript &hyp) {
  return word_edit_counts(ref, hyp).rate();
}
inline double cer(const TaggedTranscript &ref, const TaggedTranscript &hyp) {
  return char_edit_counts(ref, hyp).rate();
}
inline double pauer(const PauseSeq &ref, const PauseSeq &hyp) {
  return edit_counts(ref.bits, hyp.bits).rate();
}
inline double iper(const IPSeq &ref, const IPSeq &hyp) {
  return edit_counts(ref.codes, hyp.codes).rate();
}

// ---------------------------------------------------------------------------
// Corpus scoring

struct HypRecord {
  std::string utterance_id;
  TaggedTranscript transcript;
  std::vector<int> head_labels;
};

struct MetricCounts {
  EditCounts word, chr, pause, ip;
  std::size_t utterances = 0;
  std::size_t coerced_pauses = 0;
  std::size_t forced_words = 0;

  MetricCounts &operator+=(const MetricCounts &o) {
    word += o.word;
    chr += o.chr;
    pause += o.pause;
    ip += o.ip;
    utterances += o.utterances;
    coerced_pauses += o.coerced_pauses;
    forced_words += o.forced_words;
    return *this;
  }
};

struct CorpusReport {
  MetricCounts overall;
  std::map<Severity, MetricCounts> per_severity;
};

inline MetricCounts score_utterance(const ManifestRecord &ref, const HypRecord &hyp) {
  const auto ref_t = parse_tagged(ref.transcript);
  const auto ref_ip = to_ip_seq(ref_t, IPAnnotation{ref.ip_labels});
  const auto pred = predicted_ip_seq(hyp.transcript, hyp.head_labels);
  MetricCounts m;
  m.word = word_edit_counts(ref_t, hyp.transcript);
  m.chr = char_edit_counts(ref_t, hyp.transcript);
  m.pause = edit_counts(to_pause_seq(ref_t).bits, to_pause_seq(hyp.transcript).bits);
  m.ip = edit_counts(ref_ip.codes, pred.seq.codes);
  m.utterances = 1;
  m.coerced_pauses = pred.coerced_pauses;
  m.forced_words = pred.forced_words;
  return m;
}

/// Pools edit counts and reference lengths over utterances (rates are
/// computed from the pooled sums, not averaged). Every reference id must
/// have exactly one hypothesis and vice versa.
inline CorpusReport score_corpus(std::span<const ManifestRecord> refs,
                                 std::span<const HypRecord> hyps, std::size_t jobs = 1) {
  if (refs.empty() || hyps.empty())
    throw Error(ErrorCode::kIdMismatch, "reference or hypothesis set is empty");
  std::unordered_map<std::string, const HypRecord *> by_id;
  for (const auto &h : hyps)
    if (!by_id.emplace(h.utterance_id, &h).second)
      throw Error(ErrorCode::kIdMismatch, "duplicate hypothesis id " + h.utterance_id);
  if (by_id.size() != refs.size())
    throw Error(ErrorCode::kIdMismatch, std::to_string(refs.size()) + " references vs " +
                                            std::to_string(by_id.size()) + " hypotheses");
  std::set<std::string> ref_ids;
  for (const auto &r : refs)
    if (!ref_ids.insert(r.utterance_id).second)
      throw Error(ErrorCode::kIdMismatch, "duplicate reference id " + r.utterance_id);
  std::vector<const HypRecord *> matched(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    auto it = by_id.find(refs[i].utterance_id);
    if (it == by_id.end())
      throw Error(ErrorCode::kIdMismatch, "no hypothesis for " + refs[i].utterance_id);
    matched[i] = it->second;
  }
  std::vector<MetricCounts> per_utt(refs.size());
  parallel_for(refs.size(), jobs, [&](std::size_t i) { per_utt[i] = score_utterance(refs[i], *matched[i]); });

  CorpusReport report;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    report.overall += per_utt[i];
    report.per_severity[refs[i].severity] += per_utt[i];
  }
  return report;
}

}  // namespace pausekit
