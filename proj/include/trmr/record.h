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

#ifndef TRMR_RECORD_H_
#define TRMR_RECORD_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "trmr/derivation.h"
#include "trmr/grounding.h"
#include "trmr/tree.h"

namespace trmr {

enum class RecordStatus { kDraft, kSubmitted, kInValidation, kAccepted, kRejected, kNeedsRevision };

const char *RecordStatusName(RecordStatus status);
std::optional<RecordStatus> RecordStatusFromName(std::string_view name);

// draft→submitted→in_validation→{accepted, rejected, needs_revision}, and
// needs_revision→draft.
bool IsAllowedTransition(RecordStatus from, RecordStatus to);

enum class Verdict { kValid, kInvalid };

struct ValidationVerdict {
  std::string record_id;
  std::string validator_id;
  Verdict verdict = Verdict::kValid;
  std::optional<std::string> note;

  bool operator==(const ValidationVerdict &) const = default;
};

// One question's full TRMR plus its workflow state. The record id is the
// question id.
struct AnnotationRecord {
  std::string id;
  std::string question_id;
  TrmrTree tree;
  Grounding grounding;
  DerivationPlan plan;
  std::string annotator_id;
  RecordStatus status = RecordStatus::kDraft;
  // False when executing the plan does not reproduce the gold answer.
  bool consistency = true;
  std::vector<ValidationVerdict> verdicts;
  // Bumped on every mutation; used for compare-and-set.
  std::uint64_t version = 0;

  bool operator==(const AnnotationRecord &) const = default;
};

nlohmann::json VerdictToJson(const ValidationVerdict &verdict);
ValidationVerdict VerdictFromJson(const nlohmann::json &json);

nlohmann::json RecordToJson(const AnnotationRecord &record);
// Throws SchemaError. Offsets are not checked against any text here.
AnnotationRecord RecordFromJson(const nlohmann::json &json);

}  // namespace trmr

#endif  // TRMR_RECORD_H_
