// Copyright 2026 The TRMR Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRMR_DECIMAL_H_
#define TRMR_DECIMAL_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace trmr {

// Fixed-point decimal with nine fractional digits. Sums and differences of
// values read from text are exact, so 100 - 83.1 is 16.9 and not
// 16.900000000000006.
class Decimal {
 public:
  static constexpr int kFractionDigits = 9;
  static constexpr std::int64_t kScale = 1000000000;

  constexpr Decimal() = default;

  static Decimal FromInt(std::int64_t value) {
    return Decimal(static_cast<__int128>(value) * kScale);
  }

  // Parses [+-]digits[.digits]. Returns nullopt on anything else, including
  // more than kFractionDigits fractional digits.
  static std::optional<Decimal> Parse(std::string_view text);

  // Smallest representable step (1e-9).
  static constexpr Decimal Epsilon() { return Decimal(1); }

  // Canonical text: no exponent, no trailing fractional zeros ("16.9", "-3").
  std::string ToString() const;
  double ToDouble() const;

  bool IsInteger() const { return raw_ % kScale == 0; }
  bool IsNegative() const { return raw_ < 0; }
  // Integral part; caller checks IsInteger() when exactness matters.
  std::int64_t Truncate() const { return static_cast<std::int64_t>(raw_ / kScale); }

  Decimal operator-() const { return Decimal(-raw_); }
  Decimal operator+(Decimal other) const { return Decimal(raw_ + other.raw_); }
  Decimal operator-(Decimal other) const { return Decimal(raw_ - other.raw_); }
  Decimal &operator+=(Decimal other) {
    raw_ += other.raw_;
    return *this;
  }
  Decimal Abs() const { return Decimal(raw_ < 0 ? -raw_ : raw_); }

  friend constexpr bool operator==(Decimal a, Decimal b) { return a.raw_ == b.raw_; }
  friend constexpr std::strong_ordering operator<=>(Decimal a, Decimal b) {
    return a.raw_ <=> b.raw_;
  }

 private:
  constexpr explicit Decimal(__int128 raw) : raw_(raw) {}

  __int128 raw_ = 0;
};

}  // namespace trmr

#endif  // TRMR_DECIMAL_H_
