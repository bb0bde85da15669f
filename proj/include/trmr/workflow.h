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

#ifndef TRMR_WORKFLOW_H_
#define TRMR_WORKFLOW_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "trmr/grounding.h"
#include "trmr/record.h"
#include "trmr/span.h"

namespace trmr {

// Annotation check rules.
//   V1  tree leaves match the question at their offsets
//   V2  grounded spans match the passage at their offsets
//   V3  operator, arity, kind and grounding-slot checks
//   V4  executing the plan reproduces the gold answer
//   V5  every required grounding slot is non-empty
enum class Rule { kV1, kV2, kV3, kV4, kV5 };

const char *RuleName(Rule rule);

struct ValidationIssue {
  Rule rule;
  std::string where;
  std::string message;

  bool operator==(const ValidationIssue &) const = default;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  // Result of V4. Stays true when the question has no gold answer or V4
  // could not run.
  bool consistent = true;

  bool ok() const { return issues.empty(); }
  bool Has(Rule rule) const;
  std::vector<Rule> Rules() const;  // distinct, in rule order
};

// V4 is skipped when V3 fails, and V5 needs a well-formed tree as well.
ValidationReport ValidateAnnotation(const AnnotationRecord &record, const Question &question,
                                    const Passage &passage,
                                    const Lexicon &lexicon = Lexicon::Default());

nlohmann::json ValidationReportToJson(const ValidationReport &report);

enum class Decision { kPending, kAccepted, kRejected };

const char *DecisionName(Decision decision);

struct QuorumPolicy {
  int votes = 3;
  int majority = 2;
  // Decide as soon as `majority` matching verdicts arrive.
  bool early_decision = false;
};

// Pure function of the verdict multiset. Throws DuplicateValidator,
// QuestionMismatch (verdicts for different records) or TooManyVerdicts.
Decision AggregateVotes(const std::vector<ValidationVerdict> &verdicts,
                        const QuorumPolicy &policy = {});

enum class WorkerRole { kAnnotator, kValidator };
enum class WorkerStatus { kTraining, kQualified, kRetraining };

const char *WorkerRoleName(WorkerRole role);
std::optional<WorkerRole> WorkerRoleFromName(std::string_view name);
const char *WorkerStatusName(WorkerStatus status);
std::optional<WorkerStatus> WorkerStatusFromName(std::string_view name);

constexpr double kDefaultQualificationThreshold = 0.8;

struct WorkerProfile {
  std::string worker_id;
  WorkerRole role = WorkerRole::kAnnotator;
  double qualification_score = 0.0;
  WorkerStatus status = WorkerStatus::kTraining;

  bool operator==(const WorkerProfile &) const = default;
  bool qualified() const { return status == WorkerStatus::kQualified; }
};

// Score is the pass fraction; qualified iff score >= theta, otherwise
// retraining. Throws SchemaError on an empty result list.
WorkerProfile UpdateQualification(WorkerProfile worker, const std::vector<bool> &test_results,
                                  double theta = kDefaultQualificationThreshold);

nlohmann::json WorkerToJson(const WorkerProfile &worker);
WorkerProfile WorkerFromJson(const nlohmann::json &json);

}  // namespace trmr

#endif  // TRMR_WORKFLOW_H_
