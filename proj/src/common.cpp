// Copyright 2026 The pobsim Authors
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

#include "pobsim/common.hpp"

#include <array>

namespace pob {
namespace {

constexpr std::array<std::string_view, kActionKindCount> kActionNames = {
    "propose-block", "validate-block", "oracle-report",
    "fraud-attempt", "double-sign",    "idle",
};

}  // namespace

std::string_view to_string(ActionKind kind) {
  return kActionNames[static_cast<std::size_t>(kind)];
}

std::optional<ActionKind> parse_action_kind(std::string_view text) {
  for (std::size_t i = 0; i < kActionNames.size(); ++i) {
    if (kActionNames[i] == text) return static_cast<ActionKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Protocol protocol) {
  return protocol == Protocol::kPob ? "pob" : "pos";
}

std::optional<Protocol> parse_protocol(std::string_view text) {
  if (text == "pob") return Protocol::kPob;
  if (text == "pos") return Protocol::kPos;
  return std::nullopt;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kDegenerateElection: return "degenerate-election";
    case ErrorCode::kInsufficientPool: return "insufficient-pool";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kRuntime: return "runtime";
  }
  return "runtime";
}

}  // namespace pob
