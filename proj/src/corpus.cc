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

#include "trmr/corpus.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "trmr/error.h"

namespace trmr {

using nlohmann::json;

namespace {

constexpr const char *kFormat = "trmr-corpus";
constexpr int kFormatVersion = 1;

[[noreturn]] void Schema(const std::string &where, const std::string &what) {
  throw Error(ErrorCode::kSchemaError, where + ": " + what);
}

[[noreturn]] void Integrity(const std::string &what) {
  throw Error(ErrorCode::kIntegrityError, what);
}

std::string FieldString(const json &j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.dump();
  return "";
}

std::optional<int> DropMonth(const std::string &text) {
  static const char *const kMonths[] = {"january", "february", "march",     "april",
                                        "may",     "june",     "july",      "august",
                                        "september", "october", "november", "december"};
  std::string lower;
  for (char c : text) {
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (int m = 0; m < 12; ++m) {
    bool prefix = lower.size() >= 3 && std::string(kMonths[m]).rfind(lower, 0) == 0;
    if (lower == kMonths[m] || prefix) {
      return m + 1;
    }
  }
  if (!lower.empty() && lower.find_first_not_of("0123456789") == std::string::npos) {
    return std::stoi(lower);
  }
  return std::nullopt;
}

}  // namespace

const Question &Corpus::question(const std::string &id) const {
  auto it = questions.find(id);
  if (it == questions.end()) throw Error(ErrorCode::kNotFound, "question " + id);
  return it->second;
}

const Passage &Corpus::passage_of(const Question &q) const {
  auto it = passages.find(q.passage_id);
  if (it == passages.end()) throw Error(ErrorCode::kNotFound, "passage " + q.passage_id);
  return it->second;
}

std::optional<Answer> DropAnswer(const json &answer, const std::string &where) {
  if (!answer.is_object()) Schema(where, "answer must be an object");
  std::string number = answer.contains("number") ? FieldString(answer["number"]) : "";
  if (!number.empty()) {
    auto value = Decimal::Parse(number);
    if (!value) Schema(where + ".number", "not a decimal: " + number);
    return NumberAnswer{*value};
  }
  if (answer.contains("spans")) {
    const json &spans = answer["spans"];
    if (!spans.is_array()) Schema(where + ".spans", "must be an array");
    SpanAnswer span;
    for (const json &s : spans) {
      if (!s.is_string()) Schema(where + ".spans", "entries must be strings");
      span.texts.push_back(s.get<std::string>());
    }
    if (!span.texts.empty()) return span;
  }
  if (answer.contains("date")) {
    const json &d = answer["date"];
    if (!d.is_object()) Schema(where + ".date", "must be an object");
    std::string year = d.contains("year") ? FieldString(d["year"]) : "";
    std::string month = d.contains("month") ? FieldString(d["month"]) : "";
    std::string day = d.contains("day") ? FieldString(d["day"]) : "";
    if (year.empty() && month.empty() && day.empty()) return std::nullopt;
    if (year.empty() || year.find_first_not_of("0123456789") != std::string::npos) {
      Schema(where + ".date.year", "needs a numeric year, got '" + year + "'");
    }
    Date date{std::stoi(year), std::nullopt, std::nullopt};
    if (!month.empty()) {
      date.month = DropMonth(month);
      if (!date.month) Schema(where + ".date.month", "unknown month '" + month + "'");
    }
    if (!day.empty()) {
      if (day.find_first_not_of("0123456789") != std::string::npos) {
        Schema(where + ".date.day", "not a number: " + day);
      }
      date.day = std::stoi(day);
    }
    if (!IsValidDate(date)) Schema(where + ".date", "invalid date " + date.ToString());
    return DateAnswer{date};
  }
  return std::nullopt;
}

Corpus ImportDrop(const json &document, std::vector<std::string> *warnings) {
  if (!document.is_object()) Schema("$", "top level must be an object of passages");
  Corpus corpus;
  for (const auto &[passage_id, entry] : document.items()) {
    std::string where = "$." + passage_id;
    if (!entry.is_object()) Schema(where, "must be an object");
    if (!entry.contains("passage") || !entry["passage"].is_string()) {
      Schema(where + ".passage", "missing passage text");
    }
    Passage passage{passage_id, entry["passage"].get<std::string>()};
    if (passage.text.empty()) Schema(where + ".passage", "empty passage text");
    if (!entry.contains("qa_pairs") || !entry["qa_pairs"].is_array()) {
      Schema(where + ".qa_pairs", "missing qa_pairs array");
    }
    const json &pairs = entry["qa_pairs"];
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const json &qa = pairs[i];
      std::string at = where + ".qa_pairs[" + std::to_string(i) + "]";
      if (!qa.is_object()) Schema(at, "must be an object");
      if (!qa.contains("query_id") || !qa["query_id"].is_string()) {
        Schema(at + ".query_id", "missing query_id");
      }
      if (!qa.contains("question") || !qa["question"].is_string()) {
        Schema(at + ".question", "missing question text");
      }
      if (!qa.contains("answer")) Schema(at + ".answer", "missing answer");
      Question q{qa["query_id"].get<std::string>(), passage_id, qa["question"].get<std::string>(),
                 DropAnswer(qa["answer"], at + ".answer")};
      if (q.text.empty()) Schema(at + ".question", "empty question text");
      if (!q.answer && warnings) warnings->push_back(at + ": no populated answer field");
      if (corpus.questions.count(q.id)) {
        throw Error(ErrorCode::kDuplicateId, "query_id " + q.id + " at " + at);
      }
      corpus.questions.emplace(q.id, std::move(q));
    }
    corpus.passages.emplace(passage_id, std::move(passage));
  }
  return corpus;
}

Corpus ImportDropFile(const std::string &path, std::vector<std::string> *warnings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path);
  json document;
  try {
    in >> document;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kSchemaError, path + ": " + e.what());
  }
  return ImportDrop(document, warnings);
}

void CheckIntegrity(const Corpus &corpus) {
  for (const auto &[id, q] : corpus.questions) {
    if (q.id != id) Integrity("question key " + id + " holds id " + q.id);
    if (!corpus.passages.count(q.passage_id)) {
      Integrity("question " + id + " references missing passage " + q.passage_id);
    }
  }
  for (const auto &[id, record] : corpus.records) {
    if (record.id != id) Integrity("record key " + id + " holds id " + record.id);
    auto q = corpus.questions.find(record.question_id);
    if (q == corpus.questions.end()) {
      Integrity("record " + id + " references missing question " + record.question_id);
    }
    const Passage &passage = corpus.passages.at(q->second.passage_id);
    VisitNodes(record.tree, [&](const NodePath &path, const TrmrTree &node) {
      for (const TrmrArg &arg : node.args) {
        if (arg.is_span() && !arg.span().Matches(q->second.text)) {
          Integrity("record " + id + ": leaf '" + arg.span().text + "' at " + FormatPath(path) +
                    " does not match the question at [" + std::to_string(arg.span().start) +
                    ", " + std::to_string(arg.span().end) + ")");
        }
      }
    });
    for (const auto &[key, items] : record.grounding.entries) {
      for (const GroundedItem &item : items) {
        for (const Span *span : {&item.value_span, item.key_span ? &*item.key_span : nullptr}) {
          if (span && !span->Matches(passage.text)) {
            Integrity("record " + id + ": grounded span '" + span->text + "' for " +
                      FormatPath(key.path) + "/" + key.slot + " does not match the passage at [" +
                      std::to_string(span->start) + ", " + std::to_string(span->end) + ")");
          }
        }
      }
    }
  }
}

json QuestionToJson(const Question &q) {
  return json{{"type", "question"},
              {"id", q.id},
              {"passage_id", q.passage_id},
              {"text", q.text},
              {"answer", q.answer ? AnswerToJson(*q.answer) : json(nullptr)}};
}

void ExportCorpus(const Corpus &corpus, std::ostream &out) {
  out << json{{"format", kFormat},
              {"version", kFormatVersion},
              {"passages", corpus.passages.size()},
              {"questions", corpus.questions.size()},
              {"records", corpus.records.size()}}
             .dump()
      << "\n";
  for (const auto &[id, p] : corpus.passages) {
    out << json{{"type", "passage"}, {"id", p.id}, {"text", p.text}}.dump() << "\n";
  }
  for (const auto &[id, q] : corpus.questions) out << QuestionToJson(q).dump() << "\n";
  for (const auto &[id, r] : corpus.records) {
    json j = RecordToJson(r);
    j["type"] = "record";
    out << j.dump() << "\n";
  }
}

std::string ExportCorpusToString(const Corpus &corpus) {
  std::ostringstream out;
  ExportCorpus(corpus, out);
  return out.str();
}

void ExportCorpusFile(const Corpus &corpus, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kNotFound, "cannot write " + path);
  ExportCorpus(corpus, out);
}

Corpus LoadCorpus(std::istream &in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string where = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception &e) {
      Schema(where, e.what());
    }
    if (!saw_header) {
      if (!j.is_object() || j.value("format", "") != kFormat) Schema(where, "missing header");
      if (j.value("version", 0) != kFormatVersion) Schema(where, "unsupported version");
      saw_header = true;
      continue;
    }
    std::string type = j.is_object() ? j.value("type", "") : "";
    try {
      if (type == "passage") {
        Passage p{j.at("id").get<std::string>(), j.at("text").get<std::string>()};
        if (!corpus.passages.emplace(p.id, p).second) {
          throw Error(ErrorCode::kDuplicateId, "passage " + p.id + " (" + where + ")");
        }
      } else if (type == "question") {
        Question q{j.at("id").get<std::string>(), j.at("passage_id").get<std::string>(),
                   j.at("text").get<std::string>(), std::nullopt};
        if (j.contains("answer") && !j["answer"].is_null()) q.answer = AnswerFromJson(j["answer"]);
        if (!corpus.questions.emplace(q.id, q).second) {
          throw Error(ErrorCode::kDuplicateId, "question " + q.id + " (" + where + ")");
        }
      } else if (type == "record") {
        AnnotationRecord r = RecordFromJson(j);
        std::string id = r.id;
        if (!corpus.records.emplace(id, std::move(r)).second) {
          throw Error(ErrorCode::kDuplicateId, "record " + id + " (" + where + ")");
        }
      } else {
        Schema(where, "unknown line type '" + type + "'");
      }
    } catch (const json::exception &e) {
      Schema(where, e.what());
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kSchemaError) throw;
      Schema(where, e.detail());
    }
  }
  if (!saw_header) Schema("line 1", "missing header");
  CheckIntegrity(corpus);
  return corpus;
}

Corpus LoadCorpusFromString(const std::string &text) {
  std::istringstream in(text);
  return LoadCorpus(in);
}

Corpus LoadCorpusFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path);
  return LoadCorpus(in);
}

}  // namespace trmr
