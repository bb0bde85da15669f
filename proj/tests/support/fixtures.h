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

// Shared test fixtures: the operator table rows, a synthetic annotated
// corpus, corrupted records and a random tree generator.

#ifndef TRMR_TESTS_SUPPORT_FIXTURES_H_
#define TRMR_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "trmr/corpus.h"
#include "trmr/record.h"
#include "trmr/tree.h"
#include "trmr/workflow.h"

namespace trmr::testing {

struct GoldenRow {
  std::string op;
  std::string question;
  std::string expression;
  std::vector<std::string> args;
};

// One row per registry operator, in table order.
const std::vector<GoldenRow> &GoldenRows();

inline constexpr const char *kFieldGoalQuestion = "How many field goals over 40 yards were made?";
inline constexpr const char *kFieldGoalExpression = "count(filter(over 40 yards, field goals))";

inline constexpr int kTemplateCount = 18;

// Operators used by template `index % kTemplateCount`, each listed once.
std::vector<std::string> TemplateOperators(int index);

struct FixtureOptions {
  int records = 50;
  std::set<int> rejected;
  std::uint64_t seed = 7;
};

// Record i follows template i % kTemplateCount. Every record carries three
// verdicts; indices in `rejected` get an invalid majority. Question answers
// are computed by the generator, plans by AutoDerive.
Corpus MakeFixtureCorpus(const FixtureOptions &options);

inline std::string FixtureRecordId(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "r-%04d", index);
  return buf;
}

struct CorruptedRecord {
  AnnotationRecord record;
  Rule expected;
  std::string description;
};

// Ten corruptions of records in `clean`, two per rule.
std::vector<CorruptedRecord> CorruptRecords(const Corpus &clean);

struct GeneratedTree {
  TrmrTree tree;
  std::string question;
};

// Structurally valid, kind-correct tree whose leaves are spans of the
// returned question text.
GeneratedTree RandomTree(std::mt19937_64 &rng, int max_depth = 3);

}  // namespace trmr::testing

#endif  // TRMR_TESTS_SUPPORT_FIXTURES_H_
