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

#include "pobsim/rational.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "pobsim/common.hpp"

namespace pob {
namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorCode::kParse, "not a fraction: '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  require(denominator > 0, "fraction denominator must be positive");
  require(numerator >= 0, "fraction must be non-negative");
  const std::int64_t g = std::gcd(numerator, denominator);
  num_ = g == 0 ? 0 : numerator / g;
  den_ = g == 0 ? 1 : denominator / g;
}

Rational Rational::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const std::int64_t n = parse_int(text.substr(0, slash), text);
    const std::int64_t d = parse_int(text.substr(slash + 1), text);
    if (d <= 0 || n < 0) fail(ErrorCode::kParse, "not a fraction: '" + std::string(text) + "'");
    return Rational(n, d);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    if (frac_part.size() > 15 || frac_part.empty()) {
      fail(ErrorCode::kParse, "too many decimals: '" + std::string(text) + "'");
    }
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
    const std::int64_t whole = int_part.empty() ? 0 : parse_int(int_part, text);
    const std::int64_t frac = parse_int(frac_part, text);
    if (whole < 0 || frac < 0) fail(ErrorCode::kParse, "not a fraction: '" + std::string(text) + "'");
    return Rational(whole * den + frac, den);
  }
  const std::int64_t n = parse_int(text, text);
  if (n < 0) fail(ErrorCode::kParse, "not a fraction: '" + std::string(text) + "'");
  return Rational(n, 1);
}

bool Rational::reached_by(std::int64_t count, std::int64_t total) const {
  require(total > 0, "vote total must be positive");
  return static_cast<__int128>(count) * den_ >= static_cast<__int128>(num_) * total;
}

bool Rational::reached_by(double part, double whole) const {
  return part * static_cast<double>(den_) >= static_cast<double>(num_) * whole;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace pob
