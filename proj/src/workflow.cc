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

#include "trmr/workflow.h"

#include <set>

#include "trmr/derivation.h"
#include "trmr/error.h"
#include "trmr/metrics.h"

namespace trmr {

using nlohmann::json;

const char *RuleName(Rule rule) {
  switch (rule) {
    case Rule::kV1: return "V1";
    case Rule::kV2: return "V2";
    case Rule::kV3: return "V3";
    case Rule::kV4: return "V4";
    case Rule::kV5: return "V5";
  }
  return "?";
}

bool ValidationReport::Has(Rule rule) const {
  for (const ValidationIssue &issue : issues) {
    if (issue.rule == rule) return true;
  }
  return false;
}

std::vector<Rule> ValidationReport::Rules() const {
  std::vector<Rule> rules;
  for (Rule r : {Rule::kV1, Rule::kV2, Rule::kV3, Rule::kV4, Rule::kV5}) {
    if (Has(r)) rules.push_back(r);
  }
  return rules;
}

namespace {

std::string Range(const Span &span) {
  return "[" + std::to_string(span.start) + ", " + std::to_string(span.end) + ")";
}

void CheckLeaves(const TrmrTree &tree, const Question &question, ValidationReport *report) {
  VisitNodes(tree, [&](const NodePath &path, const TrmrTree &node) {
    for (std::size_t i = 0; i < node.args.size(); ++i) {
      if (!node.args[i].is_span()) continue;
      const Span &span = node.args[i].span();
      NodePath at = path;
      at.push_back(i);
      if (span.source != SpanSource::kQuestion) {
        report->issues.push_back({Rule::kV1, FormatPath(at), "leaf is not a question span"});
      } else if (!span.Matches(question.text)) {
        report->issues.push_back({Rule::kV1, FormatPath(at),
                                  "leaf '" + span.text + "' does not match the question at " +
                                      Range(span)});
      }
    }
  });
}

void CheckGroundedSpans(const Grounding &grounding, const Passage &passage,
                        ValidationReport *report) {
  for (const auto &[key, items] : grounding.entries) {
    std::string where = FormatPath(key.path) + " " + key.slot;
    for (const GroundedItem &item : items) {
      for (const Span *span : {&item.value_span, item.key_span ? &*item.key_span : nullptr}) {
        if (span == nullptr) continue;
        if (span->source != SpanSource::kPassage) {
          report->issues.push_back(
              {Rule::kV2, where, "'" + span->text + "' is not a passage span"});
        } else if (!span->Matches(passage.text)) {
          report->issues.push_back({Rule::kV2, where,
                                    "'" + span->text + "' does not match the passage at " +
                                        Range(*span)});
        }
      }
    }
  }
}

bool CheckKinds(const AnnotationRecord &record, ValidationReport *report) {
  try {
    CheckStructure(record.tree);
    Typecheck(record.tree);
  } catch (const Error &e) {
    report->issues.push_back({Rule::kV3, "/", e.what()});
    return false;
  }
  bool ok = true;
  for (const std::string &problem : GroundingKeyProblems(record.tree, record.grounding)) {
    report->issues.push_back({Rule::kV3, "grounding", problem});
    ok = false;
  }
  return ok;
}

void CheckRequiredSlots(const AnnotationRecord &record, ValidationReport *report) {
  for (const RequiredSlot &slot : RequiredSlots(record.tree)) {
    const std::vector<GroundedItem> *items = record.grounding.Find(slot.path, slot.slot);
    if (items == nullptr || items->empty()) {
      report->issues.push_back({Rule::kV5, FormatPath(slot.path) + " " + slot.slot,
                                "required slot is empty"});
    }
  }
}

void CheckConsistency(const AnnotationRecord &record, const Question &question,
                      const Lexicon &lexicon, ValidationReport *report) {
  if (!question.answer) return;
  try {
    Answer derived = Execute(record.plan, lexicon);
    if (!AnswersMatch(derived, *question.answer)) {
      report->consistent = false;
      report->issues.push_back({Rule::kV4, "plan",
                                "derived answer " + AnswerToString(derived) +
                                    " differs from gold " + AnswerToString(*question.answer)});
    }
  } catch (const Error &e) {
    report->consistent = false;
    report->issues.push_back({Rule::kV4, "plan", e.what()});
  }
}

}  // namespace

ValidationReport ValidateAnnotation(const AnnotationRecord &record, const Question &question,
                                    const Passage &passage, const Lexicon &lexicon) {
  ValidationReport report;
  CheckLeaves(record.tree, question, &report);
  CheckGroundedSpans(record.grounding, passage, &report);
  if (CheckKinds(record, &report)) {
    CheckConsistency(record, question, lexicon, &report);
    CheckRequiredSlots(record, &report);
  }
  return report;
}

json ValidationReportToJson(const ValidationReport &report) {
  json issues = json::array();
  for (const ValidationIssue &issue : report.issues) {
    issues.push_back({{"rule", RuleName(issue.rule)},
                      {"where", issue.where},
                      {"message", issue.message}});
  }
  return json{{"ok", report.ok()}, {"consistent", report.consistent}, {"issues", issues}};
}

const char *DecisionName(Decision decision) {
  switch (decision) {
    case Decision::kPending: return "pending";
    case Decision::kAccepted: return "accepted";
    case Decision::kRejected: return "rejected";
  }
  return "?";
}

Decision AggregateVotes(const std::vector<ValidationVerdict> &verdicts,
                        const QuorumPolicy &policy) {
  std::set<std::string> validators;
  int valid = 0;
  int invalid = 0;
  for (const ValidationVerdict &v : verdicts) {
    if (v.record_id != verdicts.front().record_id) {
      throw Error(ErrorCode::kQuestionMismatch,
                  "verdicts for " + verdicts.front().record_id + " and " + v.record_id);
    }
    if (!validators.insert(v.validator_id).second) {
      throw Error(ErrorCode::kDuplicateValidator,
                  v.validator_id + " voted twice on " + v.record_id);
    }
    (v.verdict == Verdict::kValid ? valid : invalid)++;
  }
  int total = valid + invalid;
  if (total > policy.votes) {
    throw Error(ErrorCode::kTooManyVerdicts,
                std::to_string(total) + " verdicts, target is " + std::to_string(policy.votes));
  }
  if (total < policy.votes && !policy.early_decision) return Decision::kPending;
  if (valid >= policy.majority) return Decision::kAccepted;
  if (invalid >= policy.majority) return Decision::kRejected;
  return Decision::kPending;
}

const char *WorkerRoleName(WorkerRole role) {
  return role == WorkerRole::kAnnotator ? "annotator" : "validator";
}

std::optional<WorkerRole> WorkerRoleFromName(std::string_view name) {
  if (name == "annotator") return WorkerRole::kAnnotator;
  if (name == "validator") return WorkerRole::kValidator;
  return std::nullopt;
}

const char *WorkerStatusName(WorkerStatus status) {
  switch (status) {
    case WorkerStatus::kTraining: return "training";
    case WorkerStatus::kQualified: return "qualified";
    case WorkerStatus::kRetraining: return "retraining";
  }
  return "?";
}

std::optional<WorkerStatus> WorkerStatusFromName(std::string_view name) {
  for (WorkerStatus s :
       {WorkerStatus::kTraining, WorkerStatus::kQualified, WorkerStatus::kRetraining}) {
    if (name == WorkerStatusName(s)) return s;
  }
  return std::nullopt;
}

WorkerProfile UpdateQualification(WorkerProfile worker, const std::vector<bool> &test_results,
                                  double theta) {
  if (test_results.empty()) {
    throw Error(ErrorCode::kSchemaError, "no test results for " + worker.worker_id);
  }
  std::size_t passed = 0;
  for (bool r : test_results) passed += r ? 1 : 0;
  double total = static_cast<double>(test_results.size());
  worker.qualification_score = static_cast<double>(passed) / total;
  // Compare in counts so 8/10 against 0.8 is not lost to rounding.
  bool qualified = static_cast<double>(passed) >= theta * total - 1e-9;
  worker.status = qualified ? WorkerStatus::kQualified : WorkerStatus::kRetraining;
  return worker;
}

json WorkerToJson(const WorkerProfile &worker) {
  return json{{"worker_id", worker.worker_id},
              {"role", WorkerRoleName(worker.role)},
              {"qualification_score", worker.qualification_score},
              {"status", WorkerStatusName(worker.status)}};
}

WorkerProfile WorkerFromJson(const json &j) try {
  WorkerProfile worker;
  worker.worker_id = j.at("worker_id").get<std::string>();
  if (worker.worker_id.empty()) throw Error(ErrorCode::kSchemaError, "empty worker_id");
  auto role = WorkerRoleFromName(j.value("role", "annotator"));
  if (!role) throw Error(ErrorCode::kSchemaError, "unknown role " + j.value("role", ""));
  worker.role = *role;
  worker.qualification_score = j.value("qualification_score", 0.0);
  auto status = WorkerStatusFromName(j.value("status", "training"));
  if (!status) throw Error(ErrorCode::kSchemaError, "unknown status " + j.value("status", ""));
  worker.status = *status;
  return worker;
} catch (const json::exception &e) {
  throw Error(ErrorCode::kSchemaError, std::string("worker: ") + e.what());
}

}  // namespace trmr
