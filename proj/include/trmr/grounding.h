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

#ifndef TRMR_GROUNDING_H_
#define TRMR_GROUNDING_H_

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "trmr/calendar.h"
#include "trmr/decimal.h"
#include "trmr/operators.h"
#include "trmr/span.h"
#include "trmr/tree.h"

namespace trmr {

// Values read out of span text. Units are carried verbatim and never
// converted.
struct NumberValue {
  Decimal value;
  std::string unit;
  bool operator==(const NumberValue &) const = default;
};

struct PercentValue {
  Decimal value;
  bool operator==(const PercentValue &) const = default;
};

using ParsedValue = std::variant<NumberValue, PercentValue, Date>;

// "44 yard", "21%", "1915-01-05".
std::string ParsedValueToString(const ParsedValue &value);

// A numeric view of a value: percents become unit "%". nullopt for dates.
struct Quantity {
  Decimal value;
  std::string unit;
};
std::optional<Quantity> AsQuantity(const ParsedValue &value);

// Lowercased, singularized unit; "percent" maps to "%".
std::string NormalizeUnit(std::string_view unit);

// Empty units are compatible with anything. Throws UnitMismatch otherwise
// when the normalized units differ; returns the non-empty unit, if any.
std::string CheckUnits(std::string_view a, std::string_view b);

struct GroundedItem {
  Span value_span;                     // passage span
  std::optional<ParsedValue> parsed;   // filled by re-parsing value_span.text
  std::optional<Span> key_span;        // entity the value belongs to

  bool operator==(const GroundedItem &) const = default;

  // key_span text if present, else the value span text.
  const std::string &KeyText() const {
    return key_span ? key_span->text : value_span.text;
  }
};

struct GroundingKey {
  NodePath path;
  std::string slot;

  auto operator<=>(const GroundingKey &) const = default;
  bool operator==(const GroundingKey &) const = default;
};

// Operator slots mapped to ordered passage items.
struct Grounding {
  std::map<GroundingKey, std::vector<GroundedItem>> entries;

  bool operator==(const Grounding &) const = default;

  void Add(const NodePath &path, const std::string &slot, GroundedItem item) {
    entries[GroundingKey{path, slot}].push_back(std::move(item));
  }
  // nullptr when the slot has no entry.
  const std::vector<GroundedItem> *Find(const NodePath &path, std::string_view slot) const;
};

// Keys naming a node the tree lacks or a slot the operator does not read.
std::vector<std::string> GroundingKeyProblems(const TrmrTree &tree, const Grounding &grounding);

// Structured form with explicit offsets. Parsed values are not stored; they
// are recomputed from span text when needed.
nlohmann::json GroundingToJson(const Grounding &grounding);
Grounding GroundingFromJson(const nlohmann::json &json);

enum class Comparator { kGreater, kGreaterEqual, kLess, kLessEqual, kEqual };

const char *ComparatorSymbol(Comparator comparator);
std::optional<Comparator> ComparatorFromSymbol(std::string_view symbol);

struct Condition {
  Comparator comparator = Comparator::kGreater;
  Decimal threshold;
  std::string unit;  // empty when none; "%" for percents

  bool operator==(const Condition &) const = default;

  // Throws UnitMismatch when units conflict.
  bool Holds(const Quantity &value) const;
  std::string ToString() const;
};

enum class Polarity { kMax, kMin };

const char *PolarityName(Polarity polarity);

// Phrase tables for condition comparators and superlatives. Built-in
// defaults can be extended from a text file with one "phrase<TAB>value"
// entry per line, where value is max, min, >, >=, <, <= or =.
class Lexicon {
 public:
  static const Lexicon &Default();

  // Defaults plus the entries of `path`. Throws SchemaError on bad lines.
  static Lexicon LoadWithDefaults(const std::string &path);

  void AddEntry(const std::string &phrase, const std::string &value);

  std::optional<Polarity> FindSuperlative(std::string_view phrase) const;
  const std::map<std::string, Comparator> &comparators() const { return comparators_; }

 private:
  std::map<std::string, Polarity> superlatives_;
  std::map<std::string, Comparator> comparators_;
};

// All non-overlapping exact occurrences, left to right.
std::vector<Span> LocateOccurrences(std::string_view needle, std::string_view source_text,
                                    SpanSource source);

// Reads the first numeral (or number word zero..twenty) and its unit, or a
// date when `expected` is kDate. Throws UnparseableValue.
ParsedValue ExtractValue(std::string_view text, ValueKind expected);

Condition ParseCondition(std::string_view text, const Lexicon &lexicon = Lexicon::Default());

Polarity SuperlativePolarity(std::string_view text,
                             const Lexicon &lexicon = Lexicon::Default());

}  // namespace trmr

#endif  // TRMR_GROUNDING_H_
