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

#include "trmr/metrics.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "trmr/error.h"

namespace trmr {

using nlohmann::json;

Decimal NumericTolerance() { return *Decimal::Parse("0.000001"); }

namespace {

std::vector<std::string> Tokens(std::string_view text) {
  std::string cleaned;
  for (char c : text) {
    unsigned char u = static_cast<unsigned char>(c);
    if (c == '-' || std::isspace(u)) {
      cleaned.push_back(' ');
    } else if (!std::ispunct(u)) {
      cleaned.push_back(static_cast<char>(std::tolower(u)));
    }
  }
  std::vector<std::string> tokens;
  std::istringstream in(cleaned);
  std::string word;
  while (in >> word) {
    if (word == "a" || word == "an" || word == "the") continue;
    tokens.push_back(word);
  }
  return tokens;
}

bool DatesMatch(const Date &predicted, const Date &gold) {
  if (predicted.year != gold.year) return false;
  if (gold.month && predicted.month != gold.month) return false;
  if (gold.day && predicted.day != gold.day) return false;
  return true;
}

double F1(std::size_t overlap, std::size_t predicted, std::size_t gold) {
  if (predicted == 0 && gold == 0) return 1.0;
  if (overlap == 0) return 0.0;
  double p = static_cast<double>(overlap) / static_cast<double>(predicted);
  double r = static_cast<double>(overlap) / static_cast<double>(gold);
  return 2 * p * r / (p + r);
}

using OffsetSet = std::set<std::pair<std::size_t, std::size_t>>;

OffsetSet Offsets(const Grounding &grounding) {
  OffsetSet out;
  for (const auto &[key, items] : grounding.entries) {
    for (const GroundedItem &item : items) {
      out.emplace(item.value_span.start, item.value_span.end);
      if (item.key_span) out.emplace(item.key_span->start, item.key_span->end);
    }
  }
  return out;
}

std::set<std::string> OperatorsOf(const TrmrTree &tree) {
  std::set<std::string> ops;
  VisitNodes(tree, [&](const NodePath &, const TrmrTree &node) { ops.insert(node.op); });
  return ops;
}

json Rate(std::optional<double> rate) { return rate ? json(*rate) : json(nullptr); }

std::optional<double> Ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string NormalizeAnswerText(std::string_view text) {
  std::string out;
  for (const std::string &t : Tokens(text)) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

bool AnswersMatch(const Answer &predicted, const Answer &gold) {
  if (predicted.index() != gold.index()) return false;
  if (auto *g = std::get_if<NumberAnswer>(&gold)) {
    return (std::get<NumberAnswer>(predicted).value - g->value).Abs() <= NumericTolerance();
  }
  if (auto *g = std::get_if<DateAnswer>(&gold)) {
    return DatesMatch(std::get<DateAnswer>(predicted).date, g->date);
  }
  std::multiset<std::string> a, b;
  for (const auto &t : std::get<SpanAnswer>(predicted).texts) a.insert(NormalizeAnswerText(t));
  for (const auto &t : std::get<SpanAnswer>(gold).texts) b.insert(NormalizeAnswerText(t));
  return a == b;
}

double AnswerF1(const Answer &predicted, const Answer &gold) {
  if (!std::holds_alternative<SpanAnswer>(gold) ||
      !std::holds_alternative<SpanAnswer>(predicted)) {
    return AnswersMatch(predicted, gold) ? 1.0 : 0.0;
  }
  std::multiset<std::string> p, g;
  for (const auto &t : std::get<SpanAnswer>(predicted).texts) {
    for (auto &w : Tokens(t)) p.insert(std::move(w));
  }
  for (const auto &t : std::get<SpanAnswer>(gold).texts) {
    for (auto &w : Tokens(t)) g.insert(std::move(w));
  }
  std::vector<std::string> common;
  std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(common));
  return F1(common.size(), p.size(), g.size());
}

double GroundingF1(const Grounding &predicted, const Grounding &gold) {
  OffsetSet p = Offsets(predicted);
  OffsetSet g = Offsets(gold);
  std::size_t overlap = 0;
  for (const auto &o : p) overlap += g.count(o);
  return F1(overlap, p.size(), g.size());
}

Prediction PredictionFromJson(const json &j, const Question *question) try {
  Prediction p;
  p.question_id = j.at("question_id").get<std::string>();
  if (j.contains("answer") && !j["answer"].is_null()) p.answer = AnswerFromJson(j["answer"]);
  if (j.contains("tree") && !j["tree"].is_null()) {
    p.tree = TreeFromJson(j["tree"]);
  } else if (j.contains("expression") && j["expression"].is_string()) {
    if (question == nullptr) {
      throw Error(ErrorCode::kNotFound, "expression needs question " + p.question_id);
    }
    p.tree = ParseTrmr(j["expression"].get<std::string>(), *question);
  }
  if (j.contains("grounding") && !j["grounding"].is_null()) {
    p.grounding = GroundingFromJson(j["grounding"]);
  }
  return p;
} catch (const json::exception &e) {
  throw Error(ErrorCode::kSchemaError, std::string("prediction: ") + e.what());
}

MetricsRow ScorePrediction(const Prediction &prediction, const AnnotationRecord &gold) {
  if (prediction.question_id != gold.question_id) {
    throw Error(ErrorCode::kQuestionMismatch,
                "prediction for " + prediction.question_id + ", gold for " + gold.question_id);
  }
  MetricsRow row;
  if (prediction.answer) {
    row.answer_em = AnswersMatch(*prediction.answer, gold.plan.final) ? 1.0 : 0.0;
    row.answer_f1 = AnswerF1(*prediction.answer, gold.plan.final);
  }
  if (prediction.tree) row.tree_exact = SameStructure(*prediction.tree, gold.tree) ? 1.0 : 0.0;
  if (prediction.grounding) row.grounding_f1 = GroundingF1(*prediction.grounding, gold.grounding);
  return row;
}

ScoreReport ScoreCorpus(const std::vector<Prediction> &predictions, const Corpus &gold) {
  std::map<std::string, const Prediction *> by_id;
  for (const Prediction &p : predictions) {
    if (!gold.questions.count(p.question_id)) {
      throw Error(ErrorCode::kNotFound, "prediction for unknown question " + p.question_id);
    }
    if (!by_id.emplace(p.question_id, &p).second) {
      throw Error(ErrorCode::kDuplicateId, "two predictions for " + p.question_id);
    }
  }
  ScoreReport report;
  MetricsRow sum;
  for (const auto &[id, record] : gold.records) {
    auto it = by_id.find(record.question_id);
    MetricsRow row;
    if (it == by_id.end()) {
      ++report.missing;
    } else {
      ++report.scored;
      row = ScorePrediction(*it->second, record);
    }
    sum.answer_em += row.answer_em;
    sum.answer_f1 += row.answer_f1;
    sum.tree_exact += row.tree_exact;
    sum.grounding_f1 += row.grounding_f1;
    for (const std::string &op : OperatorsOf(record.tree)) {
      report.per_operator[op].count++;
      report.per_operator[op].answer_em_sum += row.answer_em;
    }
  }
  if (!gold.records.empty()) {
    double n = static_cast<double>(gold.records.size());
    report.mean = {sum.answer_em / n, sum.answer_f1 / n, sum.tree_exact / n,
                   sum.grounding_f1 / n};
  }
  return report;
}

json MetricsToJson(const MetricsRow &row) {
  return json{{"answer_em", row.answer_em},
              {"answer_f1", row.answer_f1},
              {"tree_exact", row.tree_exact},
              {"grounding_f1", row.grounding_f1}};
}

json ScoreReportToJson(const ScoreReport &report) {
  json per_operator = json::object();
  for (const auto &[op, s] : report.per_operator) {
    per_operator[op] = {{"count", s.count},
                        {"accuracy", s.count ? s.answer_em_sum / static_cast<double>(s.count)
                                             : 0.0}};
  }
  return json{{"scored", report.scored},
              {"missing", report.missing},
              {"metrics", MetricsToJson(report.mean)},
              {"per_operator", per_operator}};
}

CorpusStats ComputeStats(const Corpus &corpus, const QuorumPolicy &policy) {
  CorpusStats stats;
  stats.passages = corpus.passages.size();
  stats.questions = corpus.questions.size();
  for (const auto &[id, record] : corpus.records) {
    Decision decision = AggregateVotes(record.verdicts, policy);
    auto tally = [&](auto &s) {
      s.records++;
      if (decision == Decision::kAccepted) s.accepted++;
      if (decision == Decision::kRejected) s.rejected++;
      if (decision == Decision::kPending) s.pending++;
      if (record.consistency) s.consistent++;
    };
    tally(stats);
    for (const std::string &op : OperatorsOf(record.tree)) tally(stats.per_operator[op]);
  }
  return stats;
}

std::optional<double> AcceptanceRate(const OperatorStats &s) {
  return Ratio(s.accepted, s.accepted + s.rejected);
}

std::optional<double> AcceptanceRate(const CorpusStats &s) {
  return Ratio(s.accepted, s.accepted + s.rejected);
}

std::optional<double> ConsistencyRate(const CorpusStats &s) {
  return Ratio(s.consistent, s.records);
}

json StatsToJson(const CorpusStats &stats, bool by_operator) {
  json j{{"passages", stats.passages},
         {"questions", stats.questions},
         {"records", stats.records},
         {"accepted", stats.accepted},
         {"rejected", stats.rejected},
         {"pending", stats.pending},
         {"consistent", stats.consistent},
         {"acceptance_rate", Rate(AcceptanceRate(stats))},
         {"consistency_rate", Rate(ConsistencyRate(stats))}};
  if (by_operator) {
    json per_operator = json::object();
    for (const auto &[op, s] : stats.per_operator) {
      per_operator[op] = {{"records", s.records},
                          {"accepted", s.accepted},
                          {"rejected", s.rejected},
                          {"pending", s.pending},
                          {"consistent", s.consistent},
                          {"acceptance_rate", Rate(AcceptanceRate(s))},
                          {"consistency_rate", Rate(Ratio(s.consistent, s.records))}};
    }
    j["per_operator"] = per_operator;
  }
  return j;
}

}  // namespace trmr
