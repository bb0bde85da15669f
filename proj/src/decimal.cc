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

#include "trmr/decimal.h"

#include <algorithm>

namespace trmr {

namespace {

// 10^27 keeps a margin below the __int128 limit (~1.7e38) for additions.
constexpr int kMaxIntegerDigits = 27;

}  // namespace

std::optional<Decimal> Decimal::Parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  std::string_view whole = text;
  std::string_view fraction;
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    whole = text.substr(0, dot);
    fraction = text.substr(dot + 1);
    if (fraction.empty()) return std::nullopt;
  }
  if (whole.empty() && fraction.empty()) return std::nullopt;
  if (whole.size() > kMaxIntegerDigits) return std::nullopt;
  if (fraction.size() > kFractionDigits) return std::nullopt;
  auto all_digits = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!all_digits(whole) || !all_digits(fraction)) return std::nullopt;

  __int128 raw = 0;
  for (char c : whole) raw = raw * 10 + (c - '0');
  for (char c : fraction) raw = raw * 10 + (c - '0');
  for (std::size_t i = fraction.size(); i < kFractionDigits; ++i) raw *= 10;
  return Decimal(negative ? -raw : raw);
}

std::string Decimal::ToString() const {
  __int128 magnitude = raw_ < 0 ? -raw_ : raw_;
  __int128 whole = magnitude / kScale;
  __int128 fraction = magnitude % kScale;

  std::string digits;
  do {
    digits.push_back(static_cast<char>('0' + static_cast<int>(whole % 10)));
    whole /= 10;
  } while (whole != 0);
  if (raw_ < 0) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());

  if (fraction != 0) {
    std::string frac(kFractionDigits, '0');
    for (int i = kFractionDigits - 1; i >= 0; --i) {
      frac[i] = static_cast<char>('0' + static_cast<int>(fraction % 10));
      fraction /= 10;
    }
    while (!frac.empty() && frac.back() == '0') frac.pop_back();
    digits += '.';
    digits += frac;
  }
  return digits;
}

double Decimal::ToDouble() const {
  return static_cast<double>(raw_) / static_cast<double>(kScale);
}

}  // namespace trmr
