// pausekit/io.hpp

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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pausekit/error.hpp"

namespace pausekit {

namespace internal {

inline void dump_fixed_into(const nlohmann::json &j, int decimals, int indent, int depth,
                            std::string &out) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
      std::string s(buf);
      if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
      out += s;
      break;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(),
                                     [](const auto &e) { return e.is_structured(); });
      out += '[';
      bool first = true;
      for (const auto &e : j) {
        if (!first) out += indent >= 0 && flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        dump_fixed_into(e, decimals, indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      break;
    }
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += indent >= 0 ? ": " : ":";
        dump_fixed_into(it.value(), decimals, indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace internal

/// Serializes with a fixed number of decimals for every float so output is
/// byte-stable. Keys come out sorted (nlohmann::json uses std::map).
/// indent < 0 gives a single line.
inline std::string dump_fixed(const nlohmann::json &j, int decimals = 6, int indent = -1) {
  std::string out;
  internal::dump_fixed_into(j, decimals, indent, 0, out);
  return out;
}

/// Writes to a sibling temp file and renames it over `path`.
inline void write_file_atomic(const std::string &path, const std::string &content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "rename " + tmp + " -> " + path + ": " + ec.message());
}

inline nlohmann::json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  auto j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(ErrorCode::kParse, path + " is not valid JSON");
  return j;
}

}  // namespace pausekit
