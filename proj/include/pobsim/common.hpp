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

#ifndef POBSIM_COMMON_HPP_
#define POBSIM_COMMON_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pob {

// Identity of a validator inside one simulated network.
struct ValidatorId {
  std::uint32_t value = 0;

  constexpr ValidatorId() = default;
  constexpr explicit ValidatorId(std::uint32_t v) : value(v) {}
  constexpr auto operator<=>(const ValidatorId&) const = default;
};

inline std::string to_string(ValidatorId id) { return std::to_string(id.value); }

enum class ActionKind {
  kProposeBlock,
  kValidateBlock,
  kOracleReport,
  kFraudAttempt,
  kDoubleSign,
  kIdle,
};

inline constexpr int kActionKindCount = 6;

std::string_view to_string(ActionKind kind);
std::optional<ActionKind> parse_action_kind(std::string_view text);

enum class Protocol { kPob, kPos };

std::string_view to_string(Protocol protocol);
std::optional<Protocol> parse_protocol(std::string_view text);

enum class ErrorCode {
  kInvalidInput,
  kNotFound,
  kDegenerateElection,
  kInsufficientPool,
  kParse,
  kConfig,
  kIo,
  kRuntime,
};

std::string_view to_string(ErrorCode code);

// All recoverable failures in the library are reported with this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::kInvalidInput, message);
}

}  // namespace pob

template <>
struct std::hash<pob::ValidatorId> {
  std::size_t operator()(pob::ValidatorId id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

#endif  // POBSIM_COMMON_HPP_
