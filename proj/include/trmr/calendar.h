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

#ifndef TRMR_CALENDAR_H_
#define TRMR_CALENDAR_H_

#include <cstdint>
#include <optional>
#include <string>

namespace trmr {

// A calendar date with optional month and day precision (proleptic
// Gregorian). A day is only meaningful when the month is present.
struct Date {
  int year = 0;
  std::optional<int> month;
  std::optional<int> day;

  bool operator==(const Date &) const = default;

  bool HasDay() const { return month.has_value() && day.has_value(); }

  // "1915", "1915-01", "1915-01-05".
  std::string ToString() const;
};

bool IsLeapYear(int year);
int DaysInMonth(int year, int month);

// Checks month in 1..12, day in 1..DaysInMonth, day requires month.
bool IsValidDate(const Date &date);

// Days since 1970-01-01 for a fully specified date.
std::int64_t DaysFromCivil(int year, int month, int day);

enum class TimeUnit { kDays, kMonths, kYears };

const char *TimeUnitName(TimeUnit unit);
std::optional<TimeUnit> TimeUnitFromName(const std::string &name);

// Orders two dates at the precision both share. Throws AmbiguousDate when
// they are equal at that precision but could differ at a finer one.
int CompareDates(const Date &a, const Date &b);

// to - from, in the given unit. Days require both months; a missing day is
// completed to the first of the month only when the two dates fall in
// different months. Months require both months. Years use whatever precision
// both dates share. Anything coarser raises AmbiguousDate.
std::int64_t DateDifference(const Date &from, const Date &to, TimeUnit unit);

}  // namespace trmr

#endif  // TRMR_CALENDAR_H_
