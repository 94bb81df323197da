// pausekit/error.hpp

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

#include <stdexcept>
#include <string>
#include <string_view>

namespace pausekit {

enum class ErrorCode {
  kEmptyInput,
  kMalformedTag,
  kInvalidArgument,
  kSignalTooShort,
  kUnsupportedFormat,
  kIo,
  kInvalidContext,
  kContextCountMismatch,
  kEmptyManifest,
  kInvariantViolation,
  kLengthMismatch,
  kEmptyReference,
  kIdMismatch,
  kEmptyList,
  kEmptyMatrix,
  kNonFiniteCost,
  kShapeMismatch,
  kEmptyTarget,
  kEmptyCorpus,
  kParse,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMalformedTag: return "MalformedTag";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kSignalTooShort: return "SignalTooShort";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kInvalidContext: return "InvalidContext";
    case ErrorCode::kContextCountMismatch: return "ContextCountMismatch";
    case ErrorCode::kEmptyManifest: return "EmptyManifest";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kNonFiniteCost: return "NonFiniteCost";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyTarget: return "EmptyTarget";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pausekit
