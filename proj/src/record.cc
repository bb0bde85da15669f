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

#include "trmr/record.h"

#include "trmr/error.h"

namespace trmr {

using nlohmann::json;

const char *RecordStatusName(RecordStatus status) {
  switch (status) {
    case RecordStatus::kDraft: return "draft";
    case RecordStatus::kSubmitted: return "submitted";
    case RecordStatus::kInValidation: return "in_validation";
    case RecordStatus::kAccepted: return "accepted";
    case RecordStatus::kRejected: return "rejected";
    case RecordStatus::kNeedsRevision: return "needs_revision";
  }
  return "?";
}

std::optional<RecordStatus> RecordStatusFromName(std::string_view name) {
  for (RecordStatus s : {RecordStatus::kDraft, RecordStatus::kSubmitted,
                         RecordStatus::kInValidation, RecordStatus::kAccepted,
                         RecordStatus::kRejected, RecordStatus::kNeedsRevision}) {
    if (name == RecordStatusName(s)) return s;
  }
  return std::nullopt;
}

bool IsAllowedTransition(RecordStatus from, RecordStatus to) {
  using S = RecordStatus;
  switch (from) {
    case S::kDraft: return to == S::kSubmitted;
    case S::kSubmitted: return to == S::kInValidation;
    case S::kInValidation:
      return to == S::kAccepted || to == S::kRejected || to == S::kNeedsRevision;
    case S::kNeedsRevision: return to == S::kDraft;
    case S::kAccepted:
    case S::kRejected: return false;
  }
  return false;
}

json VerdictToJson(const ValidationVerdict &verdict) {
  json j{{"record_id", verdict.record_id},
         {"validator_id", verdict.validator_id},
         {"verdict", verdict.verdict == Verdict::kValid ? "valid" : "invalid"}};
  if (verdict.note) j["note"] = *verdict.note;
  return j;
}

ValidationVerdict VerdictFromJson(const json &j) {
  if (!j.is_object() || !j.contains("record_id") || !j["record_id"].is_string() ||
      !j.contains("validator_id") || !j["validator_id"].is_string() || !j.contains("verdict") ||
      !j["verdict"].is_string()) {
    throw Error(ErrorCode::kSchemaError, "verdict needs record_id, validator_id, verdict");
  }
  std::string v = j["verdict"].get<std::string>();
  if (v != "valid" && v != "invalid") {
    throw Error(ErrorCode::kSchemaError, "verdict must be valid or invalid, got " + v);
  }
  ValidationVerdict verdict{j["record_id"].get<std::string>(),
                            j["validator_id"].get<std::string>(),
                            v == "valid" ? Verdict::kValid : Verdict::kInvalid, std::nullopt};
  if (j.contains("note") && j["note"].is_string()) verdict.note = j["note"].get<std::string>();
  return verdict;
}

json RecordToJson(const AnnotationRecord &record) {
  json verdicts = json::array();
  for (const ValidationVerdict &v : record.verdicts) verdicts.push_back(VerdictToJson(v));
  return json{{"id", record.id},
              {"question_id", record.question_id},
              {"expression", SerializeTrmr(record.tree)},
              {"tree", TreeToJson(record.tree)},
              {"grounding", GroundingToJson(record.grounding)},
              {"plan", PlanToJson(record.plan)},
              {"annotator_id", record.annotator_id},
              {"status", RecordStatusName(record.status)},
              {"consistency", record.consistency},
              {"verdicts", std::move(verdicts)},
              {"version", record.version}};
}

AnnotationRecord RecordFromJson(const json &j) try {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaError, "record must be an object");
  AnnotationRecord record;
  record.question_id = j.at("question_id").get<std::string>();
  record.id = j.value("id", record.question_id);
  record.tree = TreeFromJson(j.at("tree"));
  record.grounding = GroundingFromJson(j.value("grounding", json::array()));
  record.plan = PlanFromJson(j.at("plan"));
  record.annotator_id = j.value("annotator_id", "");
  auto status = RecordStatusFromName(j.value("status", "draft"));
  if (!status) throw Error(ErrorCode::kSchemaError, "unknown status " + j.value("status", ""));
  record.status = *status;
  record.consistency = j.value("consistency", true);
  for (const json &v : j.value("verdicts", json::array())) {
    record.verdicts.push_back(VerdictFromJson(v));
  }
  record.version = j.value("version", std::uint64_t{0});
  return record;
} catch (const json::exception &e) {
  throw Error(ErrorCode::kSchemaError, std::string("record: ") + e.what());
}

}  // namespace trmr
