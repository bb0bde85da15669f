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

#include "trmr/grounding.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>

#include "trmr/error.h"

namespace trmr {

using nlohmann::json;

namespace {

bool IsDigit(char c) { return c >= '0' && c <= '9'; }
bool IsAlpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void Unparseable(std::string_view text, const std::string &why) {
  throw Error(ErrorCode::kUnparseableValue, "'" + std::string(text) + "': " + why);
}

}  // namespace

// ---------------------------------------------------------------------------
// Values and units.

std::string ParsedValueToString(const ParsedValue &value) {
  if (const auto *n = std::get_if<NumberValue>(&value)) {
    return n->unit.empty() ? n->value.ToString() : n->value.ToString() + " " + n->unit;
  }
  if (const auto *p = std::get_if<PercentValue>(&value)) return p->value.ToString() + "%";
  return std::get<Date>(value).ToString();
}

std::optional<Quantity> AsQuantity(const ParsedValue &value) {
  if (const auto *n = std::get_if<NumberValue>(&value)) return Quantity{n->value, n->unit};
  if (const auto *p = std::get_if<PercentValue>(&value)) return Quantity{p->value, "%"};
  return std::nullopt;
}

std::string NormalizeUnit(std::string_view unit) {
  std::string u = Lower(Trim(unit));
  if (u == "%" || u == "percent" || u == "percentage" || u == "per cent") return "%";
  if (u.size() > 3 && u.back() == 's' && u[u.size() - 2] != 's') u.pop_back();
  return u;
}

std::string CheckUnits(std::string_view a, std::string_view b) {
  std::string na = NormalizeUnit(a);
  std::string nb = NormalizeUnit(b);
  if (na.empty()) return std::string(b);
  if (nb.empty()) return std::string(a);
  if (na != nb) {
    throw Error(ErrorCode::kUnitMismatch,
                "'" + std::string(a) + "' vs '" + std::string(b) + "'");
  }
  return std::string(a);
}

// ---------------------------------------------------------------------------
// Grounding container.

const std::vector<GroundedItem> *Grounding::Find(const NodePath &path,
                                                 std::string_view slot) const {
  auto it = entries.find(GroundingKey{path, std::string(slot)});
  return it == entries.end() ? nullptr : &it->second;
}

std::vector<std::string> GroundingKeyProblems(const TrmrTree &tree, const Grounding &grounding) {
  std::vector<std::string> problems;
  for (const auto &[key, items] : grounding.entries) {
    const TrmrTree *node = FindNode(tree, key.path);
    if (node == nullptr) {
      problems.push_back("no node at " + FormatPath(key.path));
      continue;
    }
    const OperatorSig *sig = FindOperator(node->op);
    if (sig == nullptr || !IsGroundingSlotOf(*sig, node->args.size(), key.slot)) {
      problems.push_back(node->op + " at " + FormatPath(key.path) + " has no slot '" +
                         key.slot + "'");
      continue;
    }
    for (std::size_t i = 0; i < node->args.size(); ++i) {
      if (!node->args[i].is_span() && sig->ArgSlot(i).name == key.slot) {
        problems.push_back("slot '" + key.slot + "' at " + FormatPath(key.path) +
                           " is not read: argument " + std::to_string(i + 1) +
                           " is a nested operation");
      }
    }
  }
  return problems;
}

json GroundingToJson(const Grounding &grounding) {
  json out = json::array();
  for (const auto &[key, items] : grounding.entries) {
    json list = json::array();
    for (const GroundedItem &item : items) {
      json j{{"value", SpanToJson(item.value_span)}};
      if (item.key_span) j["key"] = SpanToJson(*item.key_span);
      list.push_back(std::move(j));
    }
    out.push_back(json{{"path", key.path}, {"slot", key.slot}, {"items", std::move(list)}});
  }
  return out;
}

Grounding GroundingFromJson(const json &j) {
  if (!j.is_array()) throw Error(ErrorCode::kSchemaError, "grounding must be an array");
  Grounding grounding;
  for (const json &entry : j) {
    if (!entry.is_object() || !entry.contains("path") || !entry["path"].is_array() ||
        !entry.contains("slot") || !entry["slot"].is_string() || !entry.contains("items") ||
        !entry["items"].is_array()) {
      throw Error(ErrorCode::kSchemaError, "grounding entry needs path, slot, items");
    }
    NodePath path;
    for (const json &index : entry["path"]) {
      if (!index.is_number_integer() || index.get<std::int64_t>() < 0) {
        throw Error(ErrorCode::kSchemaError, "grounding path must hold child indices");
      }
      path.push_back(index.get<std::size_t>());
    }
    GroundingKey key{path, entry["slot"].get<std::string>()};
    auto &items = grounding.entries[key];
    for (const json &item : entry["items"]) {
      if (!item.is_object() || !item.contains("value")) {
        throw Error(ErrorCode::kSchemaError, "grounded item needs a value span");
      }
      GroundedItem g{SpanFromJson(item["value"], SpanSource::kPassage), std::nullopt,
                     std::nullopt};
      if (item.contains("key")) g.key_span = SpanFromJson(item["key"], SpanSource::kPassage);
      items.push_back(std::move(g));
    }
  }
  return grounding;
}

// ---------------------------------------------------------------------------
// Comparators and lexicon.

const char *ComparatorSymbol(Comparator comparator) {
  switch (comparator) {
    case Comparator::kGreater: return ">";
    case Comparator::kGreaterEqual: return ">=";
    case Comparator::kLess: return "<";
    case Comparator::kLessEqual: return "<=";
    case Comparator::kEqual: return "=";
  }
  return "?";
}

std::optional<Comparator> ComparatorFromSymbol(std::string_view symbol) {
  if (symbol == ">") return Comparator::kGreater;
  if (symbol == ">=" || symbol == "≥") return Comparator::kGreaterEqual;
  if (symbol == "<") return Comparator::kLess;
  if (symbol == "<=" || symbol == "≤") return Comparator::kLessEqual;
  if (symbol == "=") return Comparator::kEqual;
  return std::nullopt;
}

bool Condition::Holds(const Quantity &value) const {
  CheckUnits(unit, value.unit);
  switch (comparator) {
    case Comparator::kGreater: return value.value > threshold;
    case Comparator::kGreaterEqual: return value.value >= threshold;
    case Comparator::kLess: return value.value < threshold;
    case Comparator::kLessEqual: return value.value <= threshold;
    case Comparator::kEqual: return value.value == threshold;
  }
  return false;
}

std::string Condition::ToString() const {
  std::string out = std::string(ComparatorSymbol(comparator)) + " " + threshold.ToString();
  if (unit == "%") return out + "%";
  return unit.empty() ? out : out + " " + unit;
}

const char *PolarityName(Polarity polarity) {
  return polarity == Polarity::kMax ? "max" : "min";
}

const Lexicon &Lexicon::Default() {
  static const Lexicon lexicon = [] {
    Lexicon l;
    for (const char *w : {"largest", "most", "highest", "biggest", "longest", "greatest"}) {
      l.AddEntry(w, "max");
    }
    for (const char *w : {"smallest", "least", "lowest", "fewest", "shortest"}) {
      l.AddEntry(w, "min");
    }
    for (const char *w : {"larger than", "more than", "over", "greater than"}) {
      l.AddEntry(w, ">");
    }
    l.AddEntry("at least", ">=");
    for (const char *w : {"less than", "under", "smaller than", "fewer than"}) {
      l.AddEntry(w, "<");
    }
    l.AddEntry("at most", "<=");
    l.AddEntry("exactly", "=");
    return l;
  }();
  return lexicon;
}

void Lexicon::AddEntry(const std::string &phrase, const std::string &value) {
  std::string key = Lower(Trim(phrase));
  if (key.empty()) throw Error(ErrorCode::kSchemaError, "empty lexicon phrase");
  if (value == "max") {
    superlatives_[key] = Polarity::kMax;
  } else if (value == "min") {
    superlatives_[key] = Polarity::kMin;
  } else if (auto cmp = ComparatorFromSymbol(value)) {
    comparators_[key] = *cmp;
  } else {
    throw Error(ErrorCode::kSchemaError, "lexicon value '" + value + "' for '" + phrase + "'");
  }
}

Lexicon Lexicon::LoadWithDefaults(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open lexicon " + path);
  Lexicon lexicon = Default();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kSchemaError, path + ":" + std::to_string(line_no) + ": no TAB");
    }
    lexicon.AddEntry(line.substr(0, tab), std::string(Trim(line.substr(tab + 1))));
  }
  return lexicon;
}

std::optional<Polarity> Lexicon::FindSuperlative(std::string_view phrase) const {
  auto it = superlatives_.find(Lower(Trim(phrase)));
  if (it == superlatives_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Locating spans.

std::vector<Span> LocateOccurrences(std::string_view needle, std::string_view source_text,
                                    SpanSource source) {
  std::vector<Span> spans;
  if (needle.empty()) return spans;
  for (std::size_t at = source_text.find(needle); at != std::string_view::npos;
       at = source_text.find(needle, at + needle.size())) {
    spans.push_back(MakeSpan(source, source_text, at, at + needle.size()));
  }
  return spans;
}

// ---------------------------------------------------------------------------
// Value extraction.

namespace {

constexpr std::array<const char *, 21> kNumberWords = {
    "zero",    "one",     "two",       "three",    "four",    "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",  "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen", "twenty"};

// Words that never act as a unit after a number.
bool IsUnitStopWord(const std::string &w) {
  static const char *const kStop[] = {"of", "the", "and", "or", "to", "in", "on",
                                      "at", "by", "for", "with", "from", "a", "an",
                                      "than", "was", "were", "is", "as", "more", "less"};
  return std::any_of(std::begin(kStop), std::end(kStop), [&](const char *s) { return w == s; });
}

std::optional<std::size_t> NumberWordIndex(const std::string &lower) {
  for (std::size_t v = 0; v < kNumberWords.size(); ++v) {
    if (lower == kNumberWords[v]) return v;
  }
  return std::nullopt;
}

struct Numeral {
  std::size_t begin = 0;
  std::size_t end = 0;  // one past the last character of the numeral
  Decimal value;
};

// Numeral at `i`: [-]digits with optional 3-digit comma groups and fraction.
std::optional<Numeral> ReadDigits(std::string_view text, std::size_t i) {
  std::size_t begin = i;
  std::string digits;
  if (text[i] == '-') {
    digits.push_back('-');
    ++i;
  }
  std::size_t lead = i;
  while (i < text.size() && IsDigit(text[i])) digits.push_back(text[i++]);
  if (i == lead) return std::nullopt;
  if (i - lead <= 3) {
    while (i + 3 < text.size() && text[i] == ',' && IsDigit(text[i + 1]) &&
           IsDigit(text[i + 2]) && IsDigit(text[i + 3]) &&
           (i + 4 >= text.size() || !IsDigit(text[i + 4]))) {
      digits.append(text.substr(i + 1, 3));
      i += 4;
    }
  }
  if (i + 1 < text.size() && text[i] == '.' && IsDigit(text[i + 1])) {
    digits.push_back('.');
    ++i;
    while (i < text.size() && IsDigit(text[i])) digits.push_back(text[i++]);
  }
  // "4th", "1990s", "3a" are not plain numerals.
  if (i < text.size() && IsAlpha(text[i])) return std::nullopt;
  auto value = Decimal::Parse(digits);
  if (!value) return std::nullopt;
  return Numeral{begin, i, *value};
}

std::optional<Numeral> FindNumeral(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    bool boundary = i == 0 || (!IsAlnum(text[i - 1]) && text[i - 1] != '.' &&
                               text[i - 1] != ',' && text[i - 1] != '-');
    if (!boundary) continue;
    if (IsDigit(text[i]) ||
        (text[i] == '-' && i + 1 < text.size() && IsDigit(text[i + 1]))) {
      if (auto n = ReadDigits(text, i)) return n;
      while (i + 1 < text.size() && IsAlnum(text[i + 1])) ++i;
    } else if (IsAlpha(text[i])) {
      std::size_t end = i;
      while (end < text.size() && IsAlpha(text[end])) ++end;
      std::string word = Lower(text.substr(i, end - i));
      auto index = NumberWordIndex(word);
      if (index && end + 1 < text.size() && text[end] == '-') {
        // "twenty-one" is a compound numeral outside the lexicon.
        std::size_t tail = end + 1;
        while (tail < text.size() && IsAlpha(text[tail])) ++tail;
        auto unit = NumberWordIndex(Lower(text.substr(end + 1, tail - end - 1)));
        if (unit && *unit >= 1 && *unit <= 9) {
          i = tail - 1;
          continue;
        }
      }
      if (index) return Numeral{i, end, Decimal::FromInt(static_cast<std::int64_t>(*index))};
      i = end - 1;
    }
  }
  return std::nullopt;
}

ParsedValue ReadQuantity(std::string_view text, ValueKind expected) {
  auto numeral = FindNumeral(text);
  if (!numeral) Unparseable(text, "no numeral");
  std::size_t i = numeral->end;
  if (i < text.size() && text[i] == '%') return PercentValue{numeral->value};

  std::string unit;
  std::size_t j = i;
  if (j < text.size() && text[j] == '-' && j + 1 < text.size() && IsAlpha(text[j + 1])) {
    ++j;
  } else {
    while (j < text.size() && IsSpace(text[j])) ++j;
  }
  std::size_t word_end = j;
  while (word_end < text.size() && IsAlpha(text[word_end])) ++word_end;
  if (word_end > j) {
    std::string word = std::string(text.substr(j, word_end - j));
    std::string lower = Lower(word);
    if (lower == "percent" || lower == "percentage") return PercentValue{numeral->value};
    if (lower == "per") {
      std::size_t k = word_end;
      while (k < text.size() && IsSpace(text[k])) ++k;
      if (Lower(text.substr(k, 4)) == "cent") return PercentValue{numeral->value};
    }
    if (!IsUnitStopWord(lower)) unit = word;
  }
  if (expected == ValueKind::kPercent && unit.empty()) return PercentValue{numeral->value};
  return NumberValue{numeral->value, unit};
}

struct Token {
  std::size_t begin;
  std::size_t end;
  std::string text;
  bool digits;
};

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (IsDigit(text[i]) || IsAlpha(text[i])) {
      bool digits = IsDigit(text[i]);
      std::size_t b = i;
      while (i < text.size() && (digits ? IsDigit(text[i]) : IsAlpha(text[i]))) ++i;
      tokens.push_back({b, i, std::string(text.substr(b, i - b)), digits});
    } else {
      ++i;
    }
  }
  return tokens;
}

std::optional<int> MonthFromWord(const std::string &word) {
  static const char *const kMonths[] = {"january", "february", "march",     "april",
                                        "may",     "june",     "july",      "august",
                                        "september", "october", "november", "december"};
  std::string w = Lower(word);
  for (int m = 0; m < 12; ++m) {
    std::string full = kMonths[m];
    if (w == full) return m + 1;
    if (w.size() >= 3 && full.compare(0, 3, w.substr(0, 3)) == 0 &&
        (w.size() == 3 || (w == "sept" && m == 8))) {
      return m + 1;
    }
  }
  return std::nullopt;
}

std::optional<int> AsYear(const Token &t) {
  if (!t.digits || t.text.size() < 3 || t.text.size() > 4) return std::nullopt;
  return std::stoi(t.text);
}

std::optional<int> AsDay(const Token &t) {
  if (!t.digits || t.text.size() > 2) return std::nullopt;
  int d = std::stoi(t.text);
  if (d < 1 || d > 31) return std::nullopt;
  return d;
}

// Skips an ordinal suffix glued to a day ("5th").
std::size_t SkipOrdinal(const std::vector<Token> &tokens, std::size_t k) {
  if (k < tokens.size() && k > 0 && !tokens[k].digits && tokens[k].begin == tokens[k - 1].end) {
    std::string s = Lower(tokens[k].text);
    if (s == "st" || s == "nd" || s == "rd" || s == "th") return k + 1;
  }
  return k;
}

Date ReadDate(std::string_view text) {
  Date date;
  // ISO yyyy-mm-dd.
  for (std::size_t i = 0; i + 10 <= text.size(); ++i) {
    std::string_view c = text.substr(i, 10);
    bool iso = c[4] == '-' && c[7] == '-';
    for (std::size_t k : {0, 1, 2, 3, 5, 6, 8, 9}) iso = iso && IsDigit(c[k]);
    if (iso && (i == 0 || !IsAlnum(text[i - 1]))) {
      date = Date{std::stoi(std::string(c.substr(0, 4))), std::stoi(std::string(c.substr(5, 2))),
                  std::stoi(std::string(c.substr(8, 2)))};
      if (!IsValidDate(date)) Unparseable(text, "invalid calendar date");
      return date;
    }
  }

  std::vector<Token> tokens = Tokenize(text);
  for (std::size_t m = 0; m < tokens.size(); ++m) {
    if (tokens[m].digits) continue;
    auto month = MonthFromWord(tokens[m].text);
    if (!month) continue;
    std::optional<int> day;
    std::optional<int> year;
    std::size_t next = m + 1;
    if (next < tokens.size()) {
      if (auto d = AsDay(tokens[next])) {
        day = d;
        next = SkipOrdinal(tokens, next + 1);
      }
    }
    if (next < tokens.size()) year = AsYear(tokens[next]);
    if (!day && m > 0) {
      std::size_t prev = m - 1;
      if (!tokens[prev].digits && prev > 0) {
        std::string s = Lower(tokens[prev].text);
        if (s == "st" || s == "nd" || s == "rd" || s == "th" || s == "of") --prev;
        if (s == "of" && prev > 0 && !tokens[prev].digits) --prev;
      }
      if (auto d = AsDay(tokens[prev])) day = d;
    }
    if (!year) Unparseable(text, "date without a year");
    date = Date{*year, *month, day};
    if (!IsValidDate(date)) Unparseable(text, "invalid calendar date");
    return date;
  }
  for (const Token &t : tokens) {
    if (auto year = AsYear(t)) {
      bool glued = (t.begin > 0 && IsAlpha(text[t.begin - 1])) ||
                   (t.end < text.size() && IsAlpha(text[t.end]));
      if (!glued) return Date{*year, std::nullopt, std::nullopt};
    }
  }
  Unparseable(text, "no date");
}

}  // namespace

ParsedValue ExtractValue(std::string_view text, ValueKind expected) {
  if (expected == ValueKind::kDate) return ReadDate(text);
  return ReadQuantity(text, expected);
}

Condition ParseCondition(std::string_view text, const Lexicon &lexicon) {
  std::string lower = Lower(text);
  std::size_t best_at = std::string::npos;
  std::size_t best_len = 0;
  Comparator best = Comparator::kGreater;
  for (const auto &[phrase, comparator] : lexicon.comparators()) {
    for (std::size_t at = lower.find(phrase); at != std::string::npos;
         at = lower.find(phrase, at + 1)) {
      std::size_t end = at + phrase.size();
      bool bounded = (at == 0 || !IsAlnum(lower[at - 1])) &&
                     (end == lower.size() || !IsAlnum(lower[end]));
      if (!bounded) continue;
      if (at < best_at || (at == best_at && phrase.size() > best_len)) {
        best_at = at;
        best_len = phrase.size();
        best = comparator;
      }
      break;
    }
  }
  if (best_at == std::string::npos) {
    throw Error(ErrorCode::kUnparseableCondition, "'" + std::string(text) + "': no comparator");
  }
  std::string_view rest = text.substr(best_at + best_len);
  try {
    auto quantity = AsQuantity(ExtractValue(rest, ValueKind::kNumber));
    return Condition{best, quantity->value, quantity->unit};
  } catch (const Error &) {
    throw Error(ErrorCode::kUnparseableCondition, "'" + std::string(text) + "': no threshold");
  }
}

Polarity SuperlativePolarity(std::string_view text, const Lexicon &lexicon) {
  if (auto polarity = lexicon.FindSuperlative(text)) return *polarity;
  throw Error(ErrorCode::kUnknownSuperlative, "'" + std::string(text) + "'");
}

}  // namespace trmr
