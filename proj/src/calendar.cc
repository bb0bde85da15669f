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

#include "trmr/calendar.h"

#include <cstdio>

#include "trmr/error.h"

namespace trmr {

std::string Date::ToString() const {
  char buf[32];
  if (HasDay()) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, *month, *day);
  } else if (month) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, *month);
  } else {
    std::snprintf(buf, sizeof(buf), "%04d", year);
  }
  return buf;
}

bool IsLeapYear(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int DaysInMonth(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && IsLeapYear(year)) return 29;
  return kDays[month - 1];
}

bool IsValidDate(const Date &date) {
  if (date.day && !date.month) return false;
  if (date.month && (*date.month < 1 || *date.month > 12)) return false;
  if (date.day && (*date.day < 1 || *date.day > DaysInMonth(date.year, *date.month))) {
    return false;
  }
  return true;
}

// Era-based conversion; valid for the whole proleptic Gregorian range.
std::int64_t DaysFromCivil(int year, int month, int day) {
  std::int64_t y = static_cast<std::int64_t>(year) - (month <= 2 ? 1 : 0);
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t mp = (month + 9) % 12;
  const std::int64_t doy = (153 * mp + 2) / 5 + day - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

const char *TimeUnitName(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::kDays: return "days";
    case TimeUnit::kMonths: return "months";
    case TimeUnit::kYears: return "years";
  }
  return "days";
}

std::optional<TimeUnit> TimeUnitFromName(const std::string &name) {
  if (name == "days" || name == "day") return TimeUnit::kDays;
  if (name == "months" || name == "month") return TimeUnit::kMonths;
  if (name == "years" || name == "year") return TimeUnit::kYears;
  return std::nullopt;
}

namespace {

int Sign(std::int64_t v) { return (v > 0) - (v < 0); }

[[noreturn]] void Ambiguous(const Date &a, const Date &b, const char *what) {
  throw Error(ErrorCode::kAmbiguousDate,
              a.ToString() + " vs " + b.ToString() + ": " + what);
}

std::int64_t MonthIndex(const Date &d) {
  return static_cast<std::int64_t>(d.year) * 12 + (*d.month - 1);
}

// Whole months from `from` to `to`, truncated toward zero.
std::int64_t MonthDifference(const Date &from, const Date &to) {
  std::int64_t diff = MonthIndex(to) - MonthIndex(from);
  if (from.HasDay() && to.HasDay()) {
    if (diff > 0 && *to.day < *from.day) --diff;
    if (diff < 0 && *to.day > *from.day) ++diff;
  }
  return diff;
}

}  // namespace

int CompareDates(const Date &a, const Date &b) {
  if (a.year != b.year) return Sign(static_cast<std::int64_t>(a.year) - b.year);
  if (!a.month || !b.month) Ambiguous(a, b, "same year, month unknown");
  if (*a.month != *b.month) return Sign(*a.month - *b.month);
  if (!a.HasDay() || !b.HasDay()) Ambiguous(a, b, "same month, day unknown");
  return Sign(*a.day - *b.day);
}

std::int64_t DateDifference(const Date &from, const Date &to, TimeUnit unit) {
  switch (unit) {
    case TimeUnit::kDays: {
      if (!from.month || !to.month) Ambiguous(from, to, "day count needs months");
      if (!(from.HasDay() && to.HasDay()) && MonthIndex(from) == MonthIndex(to)) {
        Ambiguous(from, to, "day count within one month needs days");
      }
      return DaysFromCivil(to.year, *to.month, to.day.value_or(1)) -
             DaysFromCivil(from.year, *from.month, from.day.value_or(1));
    }
    case TimeUnit::kMonths:
      if (!from.month || !to.month) Ambiguous(from, to, "month count needs months");
      return MonthDifference(from, to);
    case TimeUnit::kYears:
      if (from.month && to.month) return MonthDifference(from, to) / 12;
      return static_cast<std::int64_t>(to.year) - from.year;
  }
  return 0;
}

}  // namespace trmr
