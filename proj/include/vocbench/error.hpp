// Copyright 2026 The vocbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vocbench {

enum class ErrorKind {
  kParse,        // malformed input text
  kSchema,       // well-formed but missing required elements
  kGeometry,     // box/tile violates a geometric invariant
  kRange,        // value outside its allowed interval
  kConsistency,  // two sources of truth disagree
  kOrdering,     // sequence not in the required order
  kUsage,        // caller passed arguments the operation cannot accept
  kIo,           // filesystem or codec failure
};

inline std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kSchema: return "schema error";
    case ErrorKind::kGeometry: return "geometry error";
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kConsistency: return "consistency error";
    case ErrorKind::kOrdering: return "ordering error";
    case ErrorKind::kUsage: return "usage error";
    case ErrorKind::kIo: return "io error";
  }
  return "error";
}

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind),
        message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  // The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace vocbench
