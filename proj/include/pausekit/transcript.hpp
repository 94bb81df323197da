// pausekit/transcript.hpp

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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pausekit/error.hpp"

namespace pausekit {

inline constexpr std::string_view kPauseTag = "<SIL>";

enum class TokenKind { kWord, kPause };

struct Token {
  TokenKind kind = TokenKind::kWord;
  std::string surface;

  static Token word(std::string surface) {
    return Token{TokenKind::kWord, std::move(surface)};
  }
  static Token pause() { return Token{TokenKind::kPause, std::string(kPauseTag)}; }

  bool is_pause() const { return kind == TokenKind::kPause; }
  bool is_word() const { return kind == TokenKind::kWord; }

  friend bool operator==(const Token &, const Token &) = default;
};

inline bool is_space_char(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

// Splits on ASCII whitespace. Multi-byte UTF-8 sequences never contain
// bytes in the ASCII range, so Korean text splits correctly.
inline std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> items;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space_char(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space_char(text[i])) ++i;
    if (i > start) items.push_back(text.substr(start, i - start));
  }
  return items;
}

// Checks a word surface; returns an empty string if valid, else the reason.
inline std::string word_surface_problem(std::string_view surface) {
  if (surface.empty()) return "empty word";
  for (char c : surface)
    if (is_space_char(c)) return "word contains whitespace";
  if (surface == kPauseTag) return "word surface equals the pause tag";
  if (surface.find(kPauseTag) != std::string_view::npos)
    return "pause tag embedded in word '" + std::string(surface) + "'";
  return {};
}

/// A transcript with text-level pause tags: word tokens interleaved with
/// pause tokens, never two pauses in a row.
class TaggedTranscript {
 public:
  TaggedTranscript() = default;

  /// Throws kInvariantViolation on adjacent pauses or invalid word surfaces.
  explicit TaggedTranscript(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      const Token &tok = tokens_[i];
      if (tok.is_pause()) {
        if (tok.surface != kPauseTag)
          throw Error(ErrorCode::kInvariantViolation,
                      "pause token with surface '" + tok.surface + "'");
        if (i > 0 && tokens_[i - 1].is_pause())
          throw Error(ErrorCode::kInvariantViolation,
                      "adjacent pause tokens at position " + std::to_string(i));
      } else if (auto problem = word_surface_problem(tok.surface); !problem.empty()) {
        throw Error(ErrorCode::kInvariantViolation, problem);
      }
    }
  }

  const std::vector<Token> &tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const Token &operator[](std::size_t i) const { return tokens_[i]; }

  std::size_t pause_count() const {
    std::size_t n = 0;
    for (const auto &t : tokens_) n += t.is_pause() ? 1 : 0;
    return n;
  }
  std::size_t word_count() const { return size() - pause_count(); }

  friend bool operator==(const TaggedTranscript &, const TaggedTranscript &) = default;

 private:
  std::vector<Token> tokens_;
};

/// Parses whitespace-separated text. Items equal to <SIL> become pauses;
/// runs of pauses collapse to one and each collapse appends a message to
/// `warnings` when it is non-null.
inline TaggedTranscript parse_tagged(std::string_view text,
                                     std::vector<std::string> *warnings = nullptr) {
  auto items = split_whitespace(text);
  if (items.empty()) throw Error(ErrorCode::kEmptyInput, "transcript has no tokens");
  std::vector<Token> tokens;
  tokens.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string_view item = items[i];
    if (item == kPauseTag) {
      if (!tokens.empty() && tokens.back().is_pause()) {
        if (warnings)
          warnings->push_back("merged adjacent pause tag at item " + std::to_string(i));
        continue;
      }
      tokens.push_back(Token::pause());
    } else {
      if (item.find(kPauseTag) != std::string_view::npos)
        throw Error(ErrorCode::kMalformedTag,
                    "pause tag embedded in '" + std::string(item) + "'");
      tokens.push_back(Token::word(std::string(item)));
    }
  }
  return TaggedTranscript(std::move(tokens));
}

inline std::string serialize(const TaggedTranscript &t) {
  std::string out;
  for (const auto &tok : t.tokens()) {
    if (!out.empty()) out += ' ';
    out += tok.surface;
  }
  return out;
}

inline std::string strip_pause_tags(const TaggedTranscript &t) {
  std::string out;
  for (const auto &tok : t.tokens()) {
    if (tok.is_pause()) continue;
    if (!out.empty()) out += ' ';
    out += tok.surface;
  }
  return out;
}

}  // namespace pausekit
