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

#ifndef TRMR_METRICS_H_
#define TRMR_METRICS_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "trmr/answer.h"
#include "trmr/corpus.h"
#include "trmr/grounding.h"
#include "trmr/tree.h"
#include "trmr/workflow.h"

namespace trmr {

// Absolute tolerance for numeric answers, inclusive.
Decimal NumericTolerance();

// Lowercase, punctuation removed (hyphens split words), articles dropped,
// whitespace collapsed.
std::string NormalizeAnswerText(std::string_view text);

// Numbers within NumericTolerance(); span lists as multisets of normalized
// texts; dates on the components the gold populates.
bool AnswersMatch(const Answer &predicted, const Answer &gold);

// Bag-of-words F1 for spans, otherwise the exact match.
double AnswerF1(const Answer &predicted, const Answer &gold);

// F1 over the sets of (start, end) offsets of value and key spans.
double GroundingF1(const Grounding &predicted, const Grounding &gold);

struct Prediction {
  std::string question_id;
  std::optional<Answer> answer;
  std::optional<TrmrTree> tree;
  std::optional<Grounding> grounding;
};

// Reads {"question_id", "answer", "expression"|"tree", "grounding"}.
// "expression" needs `question` to anchor leaves.
Prediction PredictionFromJson(const nlohmann::json &json, const Question *question = nullptr);

struct MetricsRow {
  double answer_em = 0;
  double answer_f1 = 0;
  double tree_exact = 0;
  double grounding_f1 = 0;

  bool operator==(const MetricsRow &) const = default;
};

// The gold answer is the record's derived answer. Missing prediction parts
// score 0. Throws QuestionMismatch.
MetricsRow ScorePrediction(const Prediction &prediction, const AnnotationRecord &gold);

struct OperatorScore {
  std::size_t count = 0;
  double answer_em_sum = 0;
};

struct ScoreReport {
  std::size_t scored = 0;
  std::size_t missing = 0;  // gold records with no prediction, scored as 0
  MetricsRow mean;
  std::map<std::string, OperatorScore> per_operator;
};

// Every record in `gold` is scored. Predictions for unknown questions
// raise NotFound.
ScoreReport ScoreCorpus(const std::vector<Prediction> &predictions, const Corpus &gold);

nlohmann::json MetricsToJson(const MetricsRow &row);
nlohmann::json ScoreReportToJson(const ScoreReport &report);

struct OperatorStats {
  std::size_t records = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t pending = 0;
  std::size_t consistent = 0;
};

struct CorpusStats {
  std::size_t passages = 0;
  std::size_t questions = 0;
  std::size_t records = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t pending = 0;
  std::size_t consistent = 0;
  // Operators are counted once per record that uses them.
  std::map<std::string, OperatorStats> per_operator;
};

// Decisions are recomputed from each record's verdicts under `policy`.
CorpusStats ComputeStats(const Corpus &corpus, const QuorumPolicy &policy = {});

// accepted / (accepted + rejected); nullopt when nothing is decided.
std::optional<double> AcceptanceRate(const OperatorStats &stats);
std::optional<double> AcceptanceRate(const CorpusStats &stats);
// consistent / records; nullopt when there are no records.
std::optional<double> ConsistencyRate(const CorpusStats &stats);

// Undefined rates are written as null.
nlohmann::json StatsToJson(const CorpusStats &stats, bool by_operator = true);

}  // namespace trmr

#endif  // TRMR_METRICS_H_
