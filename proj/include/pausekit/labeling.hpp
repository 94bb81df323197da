// pausekit/labeling.hpp

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
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pausekit/error.hpp"
#include "pausekit/transcript.hpp"

namespace pausekit {

// ---------------------------------------------------------------------------
// Inappropriate-pause rule engine

enum class PausePosition { kWithinWordUnit, kBetweenWordUnits };

/// Annotator judgments about one qualifying pause.
struct PauseContext {
  double duration_s = 0.0;
  PausePosition position = PausePosition::kBetweenWordUnits;
  bool preceded_by_filler = false;
  bool follows_repair_attempt = false;
};

struct LabelingCriteria {
  double long_pause_s = 3.0;
  double min_pause_s = 0.150;

  void validate() const {
    if (!(min_pause_s > 0.0 && long_pause_s > min_pause_s))
      throw Error(ErrorCode::kInvalidArgument, "need long_pause_s > min_pause_s > 0");
  }
};

inline constexpr int kNonPause = 0;
inline constexpr int kAppropriatePause = 1;
inline constexpr int kInappropriatePause = 2;

/// Label 2 if the pause splits a word unit, or if it is excessively long
/// (strictly over long_pause_s) after a filler or a repair attempt.
/// Label 1 otherwise.
inline int classify_pause(const PauseContext &ctx, const LabelingCriteria &criteria) {
  criteria.validate();
  if (!(ctx.duration_s >= criteria.min_pause_s))
    throw Error(ErrorCode::kInvalidContext,
                "pause of " + std::to_string(ctx.duration_s) + " s is below the minimum");
  const bool excessive = ctx.duration_s > criteria.long_pause_s;
  if (ctx.position == PausePosition::kWithinWordUnit) return kInappropriatePause;
  if (ctx.preceded_by_filler && excessive) return kInappropriatePause;
  if (ctx.follows_repair_attempt && excessive) return kInappropriatePause;
  return kAppropriatePause;
}

/// Per-token labels in {0,1,2} aligned with a TaggedTranscript.
struct IPAnnotation {
  std::vector<int> labels;
  friend bool operator==(const IPAnnotation &, const IPAnnotation &) = default;
};

enum class DiagnosticKind {
  kMalformedLine,
  kMissingField,
  kUnexpectedField,
  kDuplicateId,
  kMissingAudioPath,
  kUnknownSeverity,
  kUnparsableTranscript,
  kLabelLengthMismatch,
  kLabelOutOfRange,
  kLabelPlacement,
};

inline std::string_view diagnostic_kind_name(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kMalformedLine: return "malformed_line";
    case DiagnosticKind::kMissingField: return "missing_field";
    case DiagnosticKind::kUnexpectedField: return "unexpected_field";
    case DiagnosticKind::kDuplicateId: return "duplicate_id";
    case DiagnosticKind::kMissingAudioPath: return "missing_audio_path";
    case DiagnosticKind::kUnknownSeverity: return "unknown_severity";
    case DiagnosticKind::kUnparsableTranscript: return "unparsable_transcript";
    case DiagnosticKind::kLabelLengthMismatch: return "label_length_mismatch";
    case DiagnosticKind::kLabelOutOfRange: return "label_out_of_range";
    case DiagnosticKind::kLabelPlacement: return "label_placement";
  }
  return "unknown";
}

struct Diagnostic {
  std::size_t record_index = 0;
  std::string utterance_id;
  DiagnosticKind kind = DiagnosticKind::kMalformedLine;
  std::string message;
};

struct AnnotationProblem {
  DiagnosticKind kind;
  std::string message;
};

// Empty result means the labels satisfy: one per token, 0 exactly at
// words, 1 or 2 exactly at pauses.
inline std::vector<AnnotationProblem> annotation_problems(const TaggedTranscript &t,
                                                          std::span<const int> labels) {
  std::vector<AnnotationProblem> problems;
  if (labels.size() != t.size()) {
    problems.push_back({DiagnosticKind::kLabelLengthMismatch,
                        std::to_string(labels.size()) + " labels for " +
                            std::to_string(t.size()) + " tokens"});
    return problems;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 0 || label > 2) {
      problems.push_back({DiagnosticKind::kLabelOutOfRange,
                          "label " + std::to_string(label) + " at position " + std::to_string(i)});
    } else if (t[i].is_word() && label != kNonPause) {
      problems.push_back({DiagnosticKind::kLabelPlacement,
                          "word '" + t[i].surface + "' at position " + std::to_string(i) +
                              " labeled " + std::to_string(label)});
    } else if (t[i].is_pause() && label == kNonPause) {
      problems.push_back({DiagnosticKind::kLabelPlacement,
                          "pause at position " + std::to_string(i) + " labeled 0"});
    }
  }
  return problems;
}

inline IPAnnotation build_ip_annotation(const TaggedTranscript &t,
                                        std::span<const PauseContext> contexts,
                                        const LabelingCriteria &criteria) {
  if (contexts.size() != t.pause_count())
    throw Error(ErrorCode::kContextCountMismatch,
                std::to_string(contexts.size()) + " contexts for " +
                    std::to_string(t.pause_count()) + " pauses");
  IPAnnotation a;
  a.labels.reserve(t.size());
  std::size_t k = 0;
  for (const auto &tok : t.tokens())
    a.labels.push_back(tok.is_pause() ? classify_pause(contexts[k++], criteria) : kNonPause);
  return a;
}

// ---------------------------------------------------------------------------
// Manifest

enum class Severity { kWithoutDysarthria, kMildToModerate, kSevere };

inline constexpr std::array<Severity, 3> kAllSeverities = {
    Severity::kWithoutDysarthria, Severity::kMildToModerate, Severity::kSevere};

inline std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::kWithoutDysarthria: return "none";
    case Severity::kMildToModerate: return "mild_moderate";
    case Severity::kSevere: return "severe";
  }
  return "none";
}

inline std::optional<Severity> parse_severity(std::string_view s) {
  for (Severity sev : kAllSeverities)
    if (severity_name(sev) == s) return sev;
  return std::nullopt;
}

struct ManifestRecord {
  std::string utterance_id;
  std::string audio_path;
  std::string transcript;  // tagged-transcript text
  std::vector<int> ip_labels;
  Severity severity = Severity::kMildToModerate;

  friend bool operator==(const ManifestRecord &, const ManifestRecord &) = default;
};

inline constexpr std::array<std::string_view, 5> kManifestKeys = {
    "utterance_id", "audio_path", "transcript", "ip_labels", "severity"};

inline nlohmann::json record_to_json(const ManifestRecord &r) {
  return nlohmann::json{{"utterance_id", r.utterance_id},
                        {"audio_path", r.audio_path},
                        {"transcript", r.transcript},
                        {"ip_labels", r.ip_labels},
                        {"severity", std::string(severity_name(r.severity))}};
}

/// Structural checks on one raw manifest object. Appends to `out`.
inline void check_record_json(const nlohmann::json &j, std::size_t index,
                              std::vector<Diagnostic> &out) {
  auto report = [&](DiagnosticKind kind, std::string message) {
    std::string id;
    if (j.is_object() && j.contains("utterance_id") && j["utterance_id"].is_string())
      id = j["utterance_id"].get<std::string>();
    out.push_back({index, std::move(id), kind, std::move(message)});
  };
  if (!j.is_object()) {
    report(DiagnosticKind::kMalformedLine, "record is not a JSON object");
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(kManifestKeys.begin(), kManifestKeys.end(), it.key()) == kManifestKeys.end())
      report(DiagnosticKind::kUnexpectedField, "unexpected key '" + it.key() + "'");

  if (!j.contains("utterance_id") || !j["utterance_id"].is_string() ||
      j["utterance_id"].get<std::string>().empty())
    report(DiagnosticKind::kMissingField, "utterance_id missing or not a non-empty string");
  if (!j.contains("audio_path") || !j["audio_path"].is_string() ||
      j["audio_path"].get<std::string>().empty())
    report(DiagnosticKind::kMissingAudioPath, "audio_path missing or empty");
  if (!j.contains("severity") || !j["severity"].is_string())
    report(DiagnosticKind::kMissingField, "severity missing or not a string");
  else if (!parse_severity(j["severity"].get<std::string>()))
    report(DiagnosticKind::kUnknownSeverity,
           "unknown severity '" + j["severity"].get<std::string>() + "'");

  std::optional<TaggedTranscript> transcript;
  if (!j.contains("transcript") || !j["transcript"].is_string()) {
    report(DiagnosticKind::kMissingField, "transcript missing or not a string");
  } else {
    try {
      transcript = parse_tagged(j["transcript"].get<std::string>());
    } catch (const Error &e) {
      report(DiagnosticKind::kUnparsableTranscript, e.what());
    }
  }

  std::optional<std::vector<int>> labels;
  if (!j.contains("ip_labels") || !j["ip_labels"].is_array()) {
    report(DiagnosticKind::kMissingField, "ip_labels missing or not an array");
  } else {
    labels.emplace();
    for (const auto &v : j["ip_labels"]) {
      if (!v.is_number_integer()) {
        report(DiagnosticKind::kLabelOutOfRange, "non-integer label " + v.dump());
        labels.reset();
        break;
      }
      labels->push_back(v.get<int>());
    }
  }
  if (transcript && labels)
    for (auto &p : annotation_problems(*transcript, *labels)) report(p.kind, std::move(p.message));
}

/// Every schema or annotation problem in a raw manifest. Empty means valid.
inline std::vector<Diagnostic> validate_manifest(std::span<const nlohmann::json> records) {
  std::vector<Diagnostic> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    check_record_json(records[i], i, out);
    const auto &j = records[i];
    if (j.is_object() && j.contains("utterance_id") && j["utterance_id"].is_string()) {
      const auto id = j["utterance_id"].get<std::string>();
      if (!seen.insert(id).second)
        out.push_back({i, id, DiagnosticKind::kDuplicateId, "duplicate utterance_id"});
    }
  }
  return out;
}

inline std::vector<Diagnostic> validate_manifest(std::span<const ManifestRecord> records) {
  std::vector<nlohmann::json> raw;
  raw.reserve(records.size());
  for (const auto &r : records) raw.push_back(record_to_json(r));
  return validate_manifest(std::span<const nlohmann::json>(raw));
}

/// Throws kParse with the first diagnostic if the object is not a valid record.
inline ManifestRecord record_from_json(const nlohmann::json &j) {
  std::vector<Diagnostic> diags;
  check_record_json(j, 0, diags);
  if (!diags.empty()) throw Error(ErrorCode::kParse, diags.front().message);
  ManifestRecord r;
  r.utterance_id = j["utterance_id"].get<std::string>();
  r.audio_path = j["audio_path"].get<std::string>();
  r.transcript = j["transcript"].get<std::string>();
  r.ip_labels = j["ip_labels"].get<std::vector<int>>();
  r.severity = *parse_severity(j["severity"].get<std::string>());
  return r;
}

/// Non-blank lines of a JSONL file parsed as JSON. Lines that fail to
/// parse come back as discarded values.
inline std::vector<nlohmann::json> read_jsonl(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (split_whitespace(line).empty()) continue;
    out.push_back(nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false));
  }
  return out;
}

inline std::vector<ManifestRecord> read_manifest(const std::string &path) {
  const auto raw = read_jsonl(path);
  std::vector<ManifestRecord> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    try {
      out.push_back(record_from_json(raw[i]));
    } catch (const Error &e) {
      throw Error(ErrorCode::kParse, path + " record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Severity-stratified split

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;

  std::array<double, 3> as_array() const { return {train, valid, test}; }

  void validate() const {
    for (double r : as_array())
      if (!(r > 0.0)) throw Error(ErrorCode::kInvalidArgument, "split ratios must be positive");
    if (std::abs(train + valid + test - 1.0) > 1e-9)
      throw Error(ErrorCode::kInvalidArgument, "split ratios must sum to 1");
  }
};

struct DatasetSplit {
  std::vector<ManifestRecord> train;
  std::vector<ManifestRecord> valid;
  std::vector<ManifestRecord> test;
};

namespace internal {

// Largest-remainder apportionment of `total` over `ratios`; ties go to the
// lower index, so the training set absorbs leftovers first.
inline std::array<std::size_t, 3> apportion(std::size_t total, const std::array<double, 3> &ratios) {
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = static_cast<double>(total) * ratios[i];
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b] + 1e-12; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k % 3]];
  return counts;
}

// Rounds the stratum-by-set table n_k * r_i so that each cell is floor or
// floor + 1 and the column sums hit the overall apportionment. Leftover
// units are placed greedily by descending remainder, then repaired with
// augmenting paths over the stratum/set bipartite graph.
inline std::vector<std::array<std::size_t, 3>> controlled_rounding(
    const std::vector<std::size_t> &stratum_sizes, const std::array<double, 3> &ratios) {
  const std::size_t K = stratum_sizes.size();
  std::size_t total = 0;
  for (auto n : stratum_sizes) total += n;
  const auto targets = apportion(total, ratios);

  std::vector<std::array<std::size_t, 3>> cells(K);
  std::vector<std::array<double, 3>> rem(K);
  std::vector<std::size_t> supply(K, 0);
  std::array<std::ptrdiff_t, 3> demand{};
  for (int i = 0; i < 3; ++i) demand[i] = static_cast<std::ptrdiff_t>(targets[i]);
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t used = 0;
    for (int i = 0; i < 3; ++i) {
      const double exact = static_cast<double>(stratum_sizes[k]) * ratios[i];
      cells[k][i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
      rem[k][i] = std::max(0.0, exact - static_cast<double>(cells[k][i]));
      used += cells[k][i];
      demand[i] -= static_cast<std::ptrdiff_t>(cells[k][i]);
    }
    supply[k] = stratum_sizes[k] - used;
  }

  // bumped[k][i]: cell (k, i) received its +1.
  std::vector<std::array<bool, 3>> bumped(K, {false, false, false});
  struct Cand { double rem; std::size_t k; int i; };
  std::vector<Cand> cands;
  for (std::size_t k = 0; k < K; ++k)
    for (int i = 0; i < 3; ++i) cands.push_back({rem[k][i], k, i});
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand &a, const Cand &b) { return a.rem > b.rem + 1e-12; });
  std::vector<std::size_t> left = supply;
  std::array<std::ptrdiff_t, 3> need = demand;
  for (const auto &c : cands) {
    if (left[c.k] > 0 && need[c.i] > 0) {
      bumped[c.k][c.i] = true;
      --left[c.k];
      --need[c.i];
    }
  }

  // Augment: move a unit from stratum k (still has supply) along
  // k -> i' (unbumped) <- k' (bumped at i') -> ... -> i with need.
  auto augment = [&](std::size_t start) {
    std::vector<bool> seen_set(3, false);
    // DFS over sets reachable from a stratum.
    std::function<bool(std::size_t)> dfs = [&](std::size_t k) -> bool {
      for (int i = 0; i < 3; ++i) {
        if (bumped[k][i] || seen_set[i]) continue;
        seen_set[i] = true;
        if (need[i] > 0) {
          bumped[k][i] = true;
          --need[i];
          return true;
        }
        for (std::size_t k2 = 0; k2 < K; ++k2) {
          if (k2 == k || !bumped[k2][i]) continue;
          bumped[k2][i] = false;
          if (dfs(k2)) {
            bumped[k][i] = true;
            return true;
          }
          bumped[k2][i] = true;
        }
      }
      return false;
    };
    return dfs(start);
  };
  for (std::size_t k = 0; k < K; ++k) {
    while (left[k] > 0) {
      if (!augment(k)) {
        // No feasible controlled rounding; fall back to the stratum's own
        // largest-remainder placement.
        for (int i = 0; i < 3 && left[k] > 0; ++i)
          if (!bumped[k][i]) { bumped[k][i] = true; --need[i]; }
        left[k] = 0;
        break;
      }
      --left[k];
    }
  }
  for (std::size_t k = 0; k < K; ++k)
    for (int i = 0; i < 3; ++i) cells[k][i] += bumped[k][i] ? 1 : 0;
  return cells;
}

}  // namespace internal

/// Shuffles each severity stratum with a seeded generator and cuts it into
/// train/valid/test. Per-stratum set sizes are within one record of
/// size * ratio, and overall set sizes follow largest-remainder rounding
/// of the total. Records come out grouped by stratum, in shuffled order.
inline DatasetSplit stratified_split(std::span<const ManifestRecord> records,
                                     const SplitRatios &ratios, std::uint64_t seed) {
  ratios.validate();
  if (records.empty()) throw Error(ErrorCode::kEmptyManifest, "no records to split");

  std::vector<std::vector<ManifestRecord>> strata(kAllSeverities.size());
  for (const auto &r : records) strata[static_cast<std::size_t>(r.severity)].push_back(r);

  std::vector<std::size_t> sizes;
  for (const auto &s : strata) sizes.push_back(s.size());
  const auto cells = internal::controlled_rounding(sizes, ratios.as_array());

  std::mt19937_64 rng(seed);
  DatasetSplit out;
  for (std::size_t k = 0; k < strata.size(); ++k) {
    auto &s = strata[k];
    std::shuffle(s.begin(), s.end(), rng);
    auto it = s.begin();
    auto take = [&](std::vector<ManifestRecord> &dst, std::size_t n) {
      dst.insert(dst.end(), it, it + static_cast<std::ptrdiff_t>(n));
      it += static_cast<std::ptrdiff_t>(n);
    };
    take(out.train, cells[k][0]);
    take(out.valid, cells[k][1]);
    take(out.test, cells[k][2]);
  }
  return out;
}

}  // namespace pausekit
