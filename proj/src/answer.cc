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

#include "trmr/answer.h"

#include "trmr/error.h"

namespace trmr {

using nlohmann::json;

std::string AnswerToString(const Answer &answer) {
  struct Visitor {
    std::string operator()(const NumberAnswer &a) const { return a.value.ToString(); }
    std::string operator()(const DateAnswer &a) const { return a.date.ToString(); }
    std::string operator()(const SpanAnswer &a) const {
      std::string out = "[";
      for (std::size_t i = 0; i < a.texts.size(); ++i) {
        if (i) out += "; ";
        out += a.texts[i];
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, answer);
}

json DateToJson(const Date &date) {
  json j{{"year", date.year}};
  if (date.month) j["month"] = *date.month;
  if (date.day) j["day"] = *date.day;
  return j;
}

Date DateFromJson(const json &j) {
  if (!j.is_object() || !j.contains("year") || !j["year"].is_number_integer()) {
    throw Error(ErrorCode::kSchemaError, "date needs an integer year");
  }
  Date date{j["year"].get<int>(), std::nullopt, std::nullopt};
  if (j.contains("month")) date.month = j["month"].get<int>();
  if (j.contains("day")) date.day = j["day"].get<int>();
  if (!IsValidDate(date)) throw Error(ErrorCode::kSchemaError, "invalid date " + j.dump());
  return date;
}

json AnswerToJson(const Answer &answer) {
  if (const auto *n = std::get_if<NumberAnswer>(&answer)) {
    return json{{"number", n->value.ToString()}};
  }
  if (const auto *s = std::get_if<SpanAnswer>(&answer)) return json{{"spans", s->texts}};
  return json{{"date", DateToJson(std::get<DateAnswer>(answer).date)}};
}

Answer AnswerFromJson(const json &j) {
  if (j.is_object() && j.contains("number") && j["number"].is_string()) {
    auto value = Decimal::Parse(j["number"].get<std::string>());
    if (!value) throw Error(ErrorCode::kSchemaError, "bad number answer " + j.dump());
    return NumberAnswer{*value};
  }
  if (j.is_object() && j.contains("spans") && j["spans"].is_array() && !j["spans"].empty()) {
    SpanAnswer span;
    for (const json &t : j["spans"]) {
      if (!t.is_string()) throw Error(ErrorCode::kSchemaError, "span answers are strings");
      span.texts.push_back(t.get<std::string>());
    }
    return span;
  }
  if (j.is_object() && j.contains("date")) return DateAnswer{DateFromJson(j["date"])};
  throw Error(ErrorCode::kSchemaError, "answer must be number, spans or date: " + j.dump());
}

}  // namespace trmr
