// tests/metrics_test.cpp

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

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pausekit/metrics.hpp"

namespace pausekit {
namespace {

std::vector<int> v(std::initializer_list<int> xs) { return xs; }

TEST(EditCounts, Examples) {
  const std::string k = "kitten", s = "sitting";
  const auto c = edit_counts(std::vector<char>(k.begin(), k.end()), std::vector<char>(s.begin(), s.end()));
  EXPECT_EQ(c.errors(), 3u);
  EXPECT_EQ(c.substitutions, 2u);
  EXPECT_EQ(c.insertions, 1u);

  const auto ip = edit_counts(v({0, 0, 1, 0, 2}), v({0, 0, 1, 0, 1}));
  EXPECT_EQ(ip.substitutions, 1u);
  EXPECT_DOUBLE_EQ(ip.rate(), 0.2);

  const auto swap = edit_counts(v({0, 1}), v({1, 0}));
  EXPECT_EQ(swap.errors(), 2u);
  EXPECT_DOUBLE_EQ(swap.rate(), 1.0);
}

TEST(EditCounts, TieOrderPrefersSubstitution) {
  const auto c = edit_counts(v({1}), v({2}));
  EXPECT_EQ(c, (EditCounts{1, 0, 0, 1}));
}

TEST(EditCounts, RateCanExceedOne) {
  EXPECT_DOUBLE_EQ(edit_counts(v({1}), v({2, 2, 2})).rate(), 3.0);
}

TEST(EditCounts, EmptyReference) {
  const auto c = edit_counts(v({}), v({1}));
  EXPECT_EQ(c.insertions, 1u);
  EXPECT_FALSE(c.rate_if_defined().has_value());
  try {
    (void)c.rate();
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyReference);
  }
}

TEST(TextMetrics, Examples) {
  EXPECT_NEAR(wer(parse_tagged("a b c"), parse_tagged("a c")), 1.0 / 3, 1e-12);
  EXPECT_NEAR(cer(parse_tagged("가을"), parse_tagged("가일")), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(wer(parse_tagged("a <SIL> b"), parse_tagged("a b")), 0.0);
  EXPECT_DOUBLE_EQ(cer(parse_tagged("ab cd"), parse_tagged("abcd")), 0.0);
  EXPECT_EQ(utf8_code_points("가a").size(), 2u);
}

TEST(SequenceMetrics, Examples) {
  EXPECT_NEAR(pauer(PauseSeq{{0, 1, 0}}, PauseSeq{{0, 0}}), 1.0 / 3, 1e-12);
  EXPECT_NEAR(pauer(PauseSeq{{0, 1, 0, 0, 1}}, PauseSeq{{1, 0, 0, 1, 0}}), 0.4, 1e-12);
  EXPECT_NEAR(iper(IPSeq{{0, 2, 0}}, IPSeq{{0, 1, 0}}), 1.0 / 3, 1e-12);
  EXPECT_NEAR(iper(IPSeq{{0, 1, 0, 2}}, IPSeq{{0, 1, 0}}), 0.25, 1e-12);
}

TEST(EditCountsProperties, MatchesRecursiveOracleExhaustively) {
  const auto all = oracle::all_sequences(3, 4);
  for (const auto &a : all)
    for (const auto &b : all) {
      const auto c = edit_counts(a, b);
      ASSERT_EQ(c.errors(), oracle::edit_distance(a, b));
      ASSERT_EQ(c.ref_len, a.size());
      // Lengths reconcile: ref - D + I == hyp.
      ASSERT_EQ(a.size() - c.deletions + c.insertions, b.size());
    }
}

TEST(EditCountsProperties, SymmetryAndTriangle) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> sym(0, 2), len(0, 12);
  auto draw = [&] {
    std::vector<int> s(len(rng));
    for (auto &x : s) x = sym(rng);
    return s;
  };
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = draw(), b = draw(), c = draw();
    const auto ab = edit_counts(a, b), ba = edit_counts(b, a);
    EXPECT_EQ(ab.errors(), ba.errors());
    EXPECT_EQ(ab.errors() == 0, a == b);
    EXPECT_LE(ab.errors(), edit_counts(a, c).errors() + edit_counts(c, b).errors());
    EXPECT_LE(ab.errors(), std::max(a.size(), b.size()));
    if (!a.empty()) {
      EXPECT_GE(ab.rate(), 0.0);
    }
  }
}

TEST(TextMetricsProperties, WerIgnoresPauseTags) {
  std::mt19937 rng(9);
  std::bernoulli_distribution coin(0.4);
  std::uniform_int_distribution<int> word(0, 4), len(1, 8);
  auto draw = [&](bool with_pauses) {
    std::string s;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      if (with_pauses && coin(rng)) s += "<SIL> ";
      s += "w" + std::to_string(word(rng)) + " ";
    }
    return s;
  };
  for (int trial = 0; trial < 300; ++trial) {
    const auto r = parse_tagged(draw(true)), h = parse_tagged(draw(true));
    const auto r_plain = parse_tagged(strip_pause_tags(r)), h_plain = parse_tagged(strip_pause_tags(h));
    EXPECT_EQ(wer(r, h), wer(r_plain, h_plain));
    EXPECT_EQ(cer(r, h), cer(r_plain, h_plain));
  }
}

ManifestRecord ref(std::string id, std::string text, std::vector<int> labels, Severity s) {
  return ManifestRecord{std::move(id), "x.wav", std::move(text), std::move(labels), s};
}
HypRecord hyp(std::string id, std::string text, std::vector<int> head) {
  return HypRecord{std::move(id), parse_tagged(text), std::move(head)};
}

TEST(ScoreCorpus, PoolsCountsNotRates) {
  // Utterance rates are 1/1 and 0/3: pooled 1/4, whereas the mean would be 1/2.
  const std::vector<ManifestRecord> refs = {ref("a", "x", {0}, Severity::kSevere),
                                            ref("b", "x y z", {0, 0, 0}, Severity::kMildToModerate)};
  const std::vector<HypRecord> hyps = {hyp("b", "x y z", {0, 0, 0}), hyp("a", "q", {0})};
  const auto rep = score_corpus(refs, hyps);
  EXPECT_DOUBLE_EQ(rep.overall.word.rate(), 0.25);
  EXPECT_DOUBLE_EQ(rep.per_severity.at(Severity::kSevere).word.rate(), 1.0);
  EXPECT_DOUBLE_EQ(rep.per_severity.at(Severity::kMildToModerate).word.rate(), 0.0);
  EXPECT_EQ(rep.overall.utterances, 2u);
}

TEST(ScoreCorpus, IdenticalIsZero) {
  const std::vector<ManifestRecord> refs = {ref("a", "x <SIL> y", {0, 2, 0}, Severity::kSevere)};
  const std::vector<HypRecord> hyps = {hyp("a", "x <SIL> y", {0, 2, 0})};
  const auto rep = score_corpus(refs, hyps, 2);
  EXPECT_EQ(rep.overall.word.errors() + rep.overall.chr.errors() + rep.overall.pause.errors() +
                rep.overall.ip.errors(),
            0u);
}

TEST(ScoreCorpus, IdMismatches) {
  const std::vector<ManifestRecord> refs = {ref("a", "x", {0}, Severity::kSevere)};
  auto expect_mismatch = [&](const std::vector<ManifestRecord> &r, const std::vector<HypRecord> &h) {
    try {
      score_corpus(r, h);
      FAIL();
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::kIdMismatch);
    }
  };
  expect_mismatch(refs, {hyp("b", "x", {0})});
  expect_mismatch(refs, {hyp("a", "x", {0}), hyp("a", "x", {0})});
  expect_mismatch(refs, {});
  expect_mismatch({refs[0], refs[0]}, {hyp("a", "x", {0}), hyp("b", "x", {0})});
}

TEST(ScoreCorpus, ParallelMatchesSerial) {
  std::vector<ManifestRecord> refs;
  std::vector<HypRecord> hyps;
  for (int i = 0; i < 40; ++i) {
    const auto id = "u" + std::to_string(i);
    refs.push_back(ref(id, "a <SIL> b c", {0, 1 + i % 2, 0, 0}, kAllSeverities[i % 3]));
    hyps.push_back(hyp(id, i % 3 ? "a b <SIL> c" : "a <SIL> b c", {0, 0, 2, 0}));
  }
  const auto serial = score_corpus(refs, hyps, 1), par = score_corpus(refs, hyps, 4);
  EXPECT_EQ(serial.overall.ip, par.overall.ip);
  EXPECT_EQ(serial.overall.pause, par.overall.pause);
  EXPECT_EQ(serial.overall.coerced_pauses, par.overall.coerced_pauses);
}

}  // namespace
}  // namespace pausekit
