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

#ifndef TRMR_CORPUS_H_
#define TRMR_CORPUS_H_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "trmr/record.h"
#include "trmr/span.h"

namespace trmr {

// Passages, questions and annotation records, each keyed (and therefore
// ordered) by id.
struct Corpus {
  std::map<std::string, Passage> passages;
  std::map<std::string, Question> questions;
  std::map<std::string, AnnotationRecord> records;

  bool operator==(const Corpus &) const = default;

  // Throw NotFound.
  const Question &question(const std::string &id) const;
  const Passage &passage_of(const Question &question) const;
};

// Reads a DROP-style document: {passage_id: {"passage": ..., "qa_pairs":
// [{"question", "answer", "query_id"}, ...]}, ...}. Questions whose answer
// has no populated field get no gold answer; `warnings` (optional) records
// them. Throws SchemaError (with a JSON path) or DuplicateId.
Corpus ImportDrop(const nlohmann::json &document, std::vector<std::string> *warnings = nullptr);
Corpus ImportDropFile(const std::string &path, std::vector<std::string> *warnings = nullptr);

// Converts one DROP answer object. nullopt when every field is empty.
std::optional<Answer> DropAnswer(const nlohmann::json &answer, const std::string &where);

// Id references resolve; tree leaves match their question; grounded spans
// match their passage. Throws IntegrityError naming the first violation.
void CheckIntegrity(const Corpus &corpus);

// Line-delimited canonical form: a header line, then passages, questions
// and records, each sorted by id. Output is byte-stable.
void ExportCorpus(const Corpus &corpus, std::ostream &out);
std::string ExportCorpusToString(const Corpus &corpus);
void ExportCorpusFile(const Corpus &corpus, const std::string &path);

// Inverse of ExportCorpus. Throws SchemaError, DuplicateId or
// IntegrityError.
Corpus LoadCorpus(std::istream &in);
Corpus LoadCorpusFromString(const std::string &text);
Corpus LoadCorpusFile(const std::string &path);

nlohmann::json QuestionToJson(const Question &question);

}  // namespace trmr

#endif  // TRMR_CORPUS_H_
