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

#ifndef POBSIM_RATIONAL_HPP_
#define POBSIM_RATIONAL_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace pob {

// Exact non-negative fraction used for supermajority thresholds. "2/3" and
// "0.67" are different thresholds and stay different.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t numerator, std::int64_t denominator);

  // Accepts "a/b", an integer, or a finite decimal such as "0.67".
  static Rational parse(std::string_view text);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double value() const { return static_cast<double>(num_) / den_; }

  // count / total >= *this, evaluated without rounding.
  bool reached_by(std::int64_t count, std::int64_t total) const;
  // part / whole >= *this for real-valued quantities (one multiplication
  // on each side, no division).
  bool reached_by(double part, double whole) const;

  std::string str() const;

  bool operator==(const Rational&) const = default;
  auto operator<=>(const Rational& other) const {
    return static_cast<__int128>(num_) * other.den_ <=>
           static_cast<__int128>(other.num_) * den_;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace pob

#endif  // POBSIM_RATIONAL_HPP_
