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

#ifndef TRMR_ANSWER_H_
#define TRMR_ANSWER_H_

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "trmr/calendar.h"
#include "trmr/decimal.h"

namespace trmr {

struct NumberAnswer {
  Decimal value;
  bool operator==(const NumberAnswer &) const = default;
};

struct SpanAnswer {
  std::vector<std::string> texts;  // never empty
  bool operator==(const SpanAnswer &) const = default;
};

struct DateAnswer {
  Date date;
  bool operator==(const DateAnswer &) const = default;
};

// DROP-compatible answer: a number, a list of spans, or a (partial) date.
using Answer = std::variant<NumberAnswer, SpanAnswer, DateAnswer>;

// "2", "[Iraq]", "[a; b]", "1915-01-05".
std::string AnswerToString(const Answer &answer);

// Canonical form: {"number": "2"} | {"spans": [...]} | {"date": {...}}.
nlohmann::json AnswerToJson(const Answer &answer);
// Throws SchemaError.
Answer AnswerFromJson(const nlohmann::json &json);

nlohmann::json DateToJson(const Date &date);
Date DateFromJson(const nlohmann::json &json);

}  // namespace trmr

#endif  // TRMR_ANSWER_H_
