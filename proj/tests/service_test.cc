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

#include "trmr/service.h"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>

#include "doctest.h"
#include "support/check.h"
#include "support/fixtures.h"
#include "trmr/corpus.h"

namespace trmr {
namespace {

using nlohmann::json;

constexpr const char *kSample = TRMR_TEST_DATA_DIR "/drop_sample.json";
constexpr const char *kFieldGoalPassage =
    "Gould kicked a 44-yard field goal, a 48-yard field goal and a 23-yard field goal. "
    "Manning threw a 12-yard pass to Clark.";

ServiceConfig Config(double sample_rate = 1.0) {
  ServiceConfig config;
  config.seed = 11;
  config.sample_rate = sample_rate;
  return config;
}

void AddWorkers(AnnotationService &service) {
  for (const char *id : {"ann-1", "ann-2"}) {
    service.RegisterWorker({id, WorkerRole::kAnnotator, 0.9, WorkerStatus::kTraining});
  }
  for (const char *id : {"val-1", "val-2", "val-3"}) {
    service.RegisterWorker({id, WorkerRole::kValidator, 0.9, WorkerStatus::kTraining});
  }
}

json PassageSpan(const std::string &text) {
  std::string passage = kFieldGoalPassage;
  std::size_t at = passage.find(text);
  REQUIRE(at != std::string::npos);
  return json{{"start", at}, {"end", at + text.size()}, {"text", text}};
}

json FieldGoalGrounding() {
  json items = json::array();
  for (const char *yards : {"44-yard", "48-yard", "23-yard"}) {
    items.push_back(json{{"value", PassageSpan(yards)}});
  }
  return json::array({json{{"path", json::array({0})}, {"slot", "items"}, {"items", items}}});
}

json FieldGoalRequest(std::uint64_t version, bool submit, const std::string &annotator = "ann-1") {
  return json{{"question_id", "q-fg"},
              {"annotator_id", annotator},
              {"version", version},
              {"expression", testing::kFieldGoalExpression},
              {"grounding", FieldGoalGrounding()},
              {"submit", submit}};
}

json Verdict(const std::string &validator, bool valid) {
  return json{{"record_id", "q-fg"},
              {"validator_id", validator},
              {"verdict", valid ? "valid" : "invalid"}};
}

std::string TempPath() {
  char name[] = "/tmp/trmr_service_XXXXXX";
  int fd = mkstemp(name);
  REQUIRE(fd >= 0);
  close(fd);
  return name;
}

TEST_CASE("worker registration applies the threshold") {
  AnnotationService service(ImportDropFile(kSample), Config());
  CHECK(service.RegisterWorker({"a", WorkerRole::kAnnotator, 0.8, WorkerStatus::kTraining})
            .qualified());
  WorkerProfile low =
      service.RegisterWorker({"b", WorkerRole::kAnnotator, 0.5, WorkerStatus::kQualified});
  CHECK(low.status == WorkerStatus::kTraining);
  CHECK(service.GetWorker("b").status == WorkerStatus::kTraining);
  WorkerProfile retrained = service.UpdateWorkerQualification(
      "b", {true, true, true, true, true, true, true, true, true, false});
  CHECK(retrained.qualified());
  CHECK_TRMR_ERROR(service.GetWorker("nobody"), ErrorCode::kUnknownWorker);
  CHECK_TRMR_ERROR(service.RegisterWorker({"", WorkerRole::kAnnotator, 1, WorkerStatus::kTraining}),
                   ErrorCode::kSchemaError);
}

TEST_CASE("annotators claim questions in id order") {
  AnnotationService service(ImportDropFile(kSample), Config());
  AddWorkers(service);
  json first = service.NextTask("ann-1");
  CHECK(first["kind"] == "annotate");
  CHECK(first["question"]["id"] == "q-empty");
  CHECK(first["passage"]["id"] == "history_22");
  CHECK_FALSE(first.contains("record"));
  CHECK(service.NextTask("ann-1")["question"]["id"] == "q-empty");
  CHECK(service.NextTask("ann-2")["question"]["id"] == "q-fg");
  CHECK(service.NextTask("ann-2")["question"]["answer"]["number"] == "2");

  CHECK_TRMR_ERROR(service.SaveAnnotation(FieldGoalRequest(0, false, "ann-1")),
                   ErrorCode::kInvalidTransition);
  service.SaveAnnotation(FieldGoalRequest(0, false, "ann-2"));
  json draft = service.NextTask("ann-2");
  CHECK(draft["question"]["id"] == "q-fg");
  CHECK(draft["record"]["status"] == "draft");

  CHECK(service.NextTask("ann-1")["question"]["id"] == "q-empty");
  service.RegisterWorker({"ann-3", WorkerRole::kAnnotator, 1, WorkerStatus::kTraining});
  CHECK(service.NextTask("ann-3")["question"]["id"] == "q-when");
  service.RegisterWorker({"ann-4", WorkerRole::kAnnotator, 1, WorkerStatus::kTraining});
  CHECK(service.NextTask("ann-4")["question"]["id"] == "q-who");
  service.RegisterWorker({"ann-5", WorkerRole::kAnnotator, 1, WorkerStatus::kTraining});
  CHECK_TRMR_ERROR(service.NextTask("ann-5"), ErrorCode::kNoTasksAvailable);
}

TEST_CASE("task assignment rejects unknown and unqualified workers") {
  AnnotationService service(ImportDropFile(kSample), Config());
  AddWorkers(service);
  service.RegisterWorker({"trainee", WorkerRole::kAnnotator, 0.2, WorkerStatus::kTraining});
  CHECK_TRMR_ERROR(service.NextTask("ghost"), ErrorCode::kUnknownWorker);
  CHECK_TRMR_ERROR(service.NextTask("trainee"), ErrorCode::kNotQualified);
  CHECK_TRMR_ERROR(service.SaveAnnotation(FieldGoalRequest(0, false, "trainee")),
                   ErrorCode::kNotQualified);
  CHECK_TRMR_ERROR(service.SaveAnnotation(FieldGoalRequest(0, false, "val-1")),
                   ErrorCode::kNotQualified);
  try {
    service.NextTask("val-1");
    FAIL("expected NoTasksAvailable");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kNoTasksAvailable);
    CHECK(e.detail() == "no records await validation");
  }
}

TEST_CASE("drafts are versioned and may be underivable") {
  AnnotationService service(ImportDropFile(kSample), Config());
  AddWorkers(service);
  json request = FieldGoalRequest(0, false);
  request["grounding"] = json::array();
  json saved = service.SaveAnnotation(request);
  CHECK(saved["record"]["id"] == "q-fg");
  CHECK(saved["record"]["status"] == "draft");
  CHECK(saved["record"]["version"] == 1);
  CHECK(saved["record"]["plan"]["steps"].empty());
  REQUIRE(saved["record"]["plan"]["warnings"].size() == 1);
  CHECK(saved["record"]["plan"]["warnings"][0].get<std::string>().rfind("not derivable yet", 0) ==
        0);

  CHECK_TRMR_ERROR(service.SaveAnnotation(request), ErrorCode::kVersionConflict);
  request["version"] = 1;
  request["submit"] = true;
  CHECK_TRMR_ERROR(service.SaveAnnotation(request), ErrorCode::kMissingSlot);

  json grounded = service.SaveAnnotation(FieldGoalRequest(1, false));
  CHECK(grounded["record"]["version"] == 2);
  CHECK(grounded["record"]["plan"]["final"]["number"] == "2");
  CHECK(grounded["record"]["consistency"] == true);
  CHECK(service.GetRecord("q-fg")["version"] == 2);
  CHECK_TRMR_ERROR(service.GetRecord("q-none"), ErrorCode::kNotFound);

  json malformed = FieldGoalRequest(2, false);
  malformed["plan"] = grounded["record"]["plan"];
  malformed["plan"]["steps"].erase(0);
  CHECK_TRMR_ERROR(service.SaveAnnotation(malformed), ErrorCode::kMalformedPlan);
  CHECK_TRMR_ERROR(service.SaveAnnotation(json{{"question_id", "q-fg"}}), ErrorCode::kSchemaError);
}

TEST_CASE("submission enters validation by sample rate") {
  AnnotationService sampled(ImportDropFile(kSample), Config(1.0));
  AddWorkers(sampled);
  json in = sampled.SaveAnnotation(FieldGoalRequest(0, true))["record"];
  CHECK(in["status"] == "in_validation");

  AnnotationService unsampled(ImportDropFile(kSample), Config(0.0));
  AddWorkers(unsampled);
  json kept = unsampled.SaveAnnotation(FieldGoalRequest(0, true))["record"];
  CHECK(kept["status"] == "submitted");
  CHECK_TRMR_ERROR(unsampled.NextTask("val-1"), ErrorCode::kNoTasksAvailable);
  CHECK_TRMR_ERROR(unsampled.SaveAnnotation(FieldGoalRequest(kept["version"], false)),
                   ErrorCode::kInvalidTransition);
}

TEST_CASE("submission with blocking issues carries a report") {
  AnnotationService service(ImportDropFile(kSample), Config());
  AddWorkers(service);
  json request = FieldGoalRequest(0, true);
  request["grounding"][0]["items"][0]["value"]["start"] = 0;
  request["grounding"][0]["items"][0]["value"]["end"] = 7;
  try {
    service.SaveAnnotation(request);
    FAIL("expected ValidationFailed");
  } catch (const ValidationFailed &e) {
    CHECK(e.code() == ErrorCode::kValidationFailed);
    REQUIRE_FALSE(e.report().issues.empty());
    CHECK(e.report().issues[0].rule == Rule::kV2);
  }
  CHECK_TRMR_ERROR(service.GetRecord("q-fg"), ErrorCode::kNotFound);
  request["submit"] = false;
  json saved = service.SaveAnnotation(request);
  CHECK(saved["record"]["status"] == "draft");
  CHECK_FALSE(saved["report"]["issues"].empty());
}

TEST_CASE("validators see records from others only") {
  ServiceConfig config = Config();
  AnnotationService hidden(ImportDropFile(kSample), config);
  AddWorkers(hidden);
  hidden.SaveAnnotation(FieldGoalRequest(0, true));
  json task = hidden.NextTask("val-1");
  CHECK(task["kind"] == "validate");
  CHECK(task["record"]["id"] == "q-fg");
  CHECK_FALSE(task["question"].contains("answer"));

  hidden.RegisterWorker({"ann-1", WorkerRole::kValidator, 1, WorkerStatus::kTraining});
  try {
    hidden.NextTask("ann-1");
    FAIL("expected NoTasksAvailable");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kNoTasksAvailable);
    CHECK(e.detail() == "only the worker's own records await validation");
  }
  CHECK_TRMR_ERROR(hidden.SubmitVerdict(Verdict("ann-1", true)), ErrorCode::kSelfValidation);

  config.validators_see_gold = true;
  AnnotationService shown(ImportDropFile(kSample), config);
  AddWorkers(shown);
  shown.SaveAnnotation(FieldGoalRequest(0, true));
  CHECK(shown.NextTask("val-1")["question"]["answer"]["number"] == "2");
  shown.SubmitVerdict(Verdict("val-1", true));
  CHECK_TRMR_ERROR(shown.NextTask("val-1"), ErrorCode::kNoTasksAvailable);
  CHECK(shown.NextTask("val-2")["record"]["id"] == "q-fg");
}

TEST_CASE("validators are picked uniformly from eligible records") {
  Corpus corpus = testing::MakeFixtureCorpus({});
  for (auto &[id, r] : corpus.records) {
    r.status = RecordStatus::kInValidation;
    r.verdicts.clear();
  }
  AnnotationService service(corpus, Config());
  service.RegisterWorker({"val-9", WorkerRole::kValidator, 1, WorkerStatus::kTraining});
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) seen.insert(service.NextTask("val-9")["record"]["id"]);
  CHECK(seen.size() > 30);
}

TEST_CASE("two of three verdicts decide") {
  AnnotationService service(ImportDropFile(kSample), Config());
  AddWorkers(service);
  service.SaveAnnotation(FieldGoalRequest(0, true));

  CHECK_TRMR_ERROR(service.SubmitVerdict(Verdict("ann-2", true)), ErrorCode::kNotQualified);
  json missing = Verdict("val-1", true);
  missing["record_id"] = "q-none";
  CHECK_TRMR_ERROR(service.SubmitVerdict(missing), ErrorCode::kNotFound);
  json stale = Verdict("val-1", true);
  stale["version"] = 99;
  CHECK_TRMR_ERROR(service.SubmitVerdict(stale), ErrorCode::kVersionConflict);

  json first = service.SubmitVerdict(Verdict("val-1", true));
  CHECK(first["decision"] == "pending");
  CHECK(first["status"] == "in_validation");
  CHECK_TRMR_ERROR(service.SubmitVerdict(Verdict("val-1", false)), ErrorCode::kDuplicateValidator);
  json second = Verdict("val-2", false);
  second["version"] = first["version"];
  CHECK(service.SubmitVerdict(second)["decision"] == "pending");
  json third = service.SubmitVerdict(Verdict("val-3", true));
  CHECK(third["decision"] == "accepted");
  CHECK(third["status"] == "accepted");
  CHECK(service.GetRecord("q-fg")["verdicts"].size() == 3);

  service.RegisterWorker({"val-4", WorkerRole::kValidator, 1, WorkerStatus::kTraining});
  CHECK_TRMR_ERROR(service.SubmitVerdict(Verdict("val-4", true)), ErrorCode::kInvalidTransition);
  CHECK(service.Stats()["accepted"] == 1);

  AnnotationService rejecting(ImportDropFile(kSample), Config());
  AddWorkers(rejecting);
  rejecting.SaveAnnotation(FieldGoalRequest(0, true));
  rejecting.SubmitVerdict(Verdict("val-1", false));
  rejecting.SubmitVerdict(Verdict("val-2", true));
  json rejected = rejecting.SubmitVerdict(Verdict("val-3", false));
  CHECK(rejected["decision"] == "rejected");
  CHECK(rejected["status"] == "rejected");
  CHECK(rejecting.Stats()["rejected"] == 1);
}

TEST_CASE("records needing revision come back to their annotator") {
  Corpus corpus;
  {
    AnnotationService service(ImportDropFile(kSample), Config());
    AddWorkers(service);
    service.SaveAnnotation(FieldGoalRequest(0, true));
    service.SubmitVerdict(Verdict("val-1", true));
    corpus = service.Snapshot();
  }
  AnnotationRecord &record = corpus.records.at("q-fg");
  record.status = RecordStatus::kNeedsRevision;
  AnnotationService service(corpus, Config());
  AddWorkers(service);
  service.NextTask("ann-1");
  json task = service.NextTask("ann-1");
  CHECK(task["kind"] == "revise");
  CHECK(task["record"]["id"] == "q-fg");

  json revised = service.SaveAnnotation(FieldGoalRequest(record.version, false))["record"];
  CHECK(revised["status"] == "draft");
  CHECK(revised["verdicts"].empty());
  CHECK(revised["version"] == record.version + 2);
}

TEST_CASE("derive previews without storing") {
  AnnotationService service(ImportDropFile(kSample), Config());
  json body{{"expression", testing::kFieldGoalExpression}, {"grounding", FieldGoalGrounding()}};
  json out = service.Derive("q-fg", body);
  CHECK(out["error"].is_null());
  CHECK(out["final"]["number"] == "2");
  CHECK(out["plan"]["steps"].size() == 2);
  CHECK(out["rendered"].get<std::string>().find("count") != std::string::npos);
  REQUIRE(out["required_slots"].size() == 1);
  CHECK(out["required_slots"][0]["slot"] == "items");

  body["grounding"] = json::array();
  json missing = service.Derive("q-fg", body);
  CHECK(missing["plan"].is_null());
  CHECK(missing["error"]["error"] == "MissingSlot");
  CHECK_TRMR_ERROR(service.GetRecord("q-fg"), ErrorCode::kNotFound);
  CHECK_TRMR_ERROR(service.Derive("q-fg", json{{"expression", "more(people)"}}),
                   ErrorCode::kSpanNotInQuestion);
  CHECK_TRMR_ERROR(service.Derive("q-none", body), ErrorCode::kNotFound);
}

TEST_CASE("locate finds spans in the question or passage") {
  AnnotationService service(ImportDropFile(kSample), Config());
  json spans = service.Locate(
      json{{"question_id", "q-fg"}, {"source", "passage"}, {"text", "field goal"}})["spans"];
  REQUIRE(spans.size() == 3);
  CHECK(spans[0] == PassageSpan("field goal"));
  json q = service.Locate(
      json{{"question_id", "q-fg"}, {"source", "question"}, {"text", "40 yards"}})["spans"];
  REQUIRE(q.size() == 1);
  CHECK(q[0]["start"] == 26);
  CHECK_TRMR_ERROR(service.Locate(json{{"question_id", "q-fg"}, {"source", "x"}, {"text", "a"}}),
                   ErrorCode::kSchemaError);
  CHECK_TRMR_ERROR(service.Locate(json{{"question_id", "q-fg"}, {"text", ""}}),
                   ErrorCode::kSchemaError);
}

TEST_CASE("event log replay restores state") {
  std::string log = TempPath();
  std::remove(log.c_str());
  ServiceConfig config = Config();
  config.event_log = log;
  Corpus before;
  {
    AnnotationService service(ImportDropFile(kSample), config);
    AddWorkers(service);
    service.NextTask("ann-1");
    service.NextTask("ann-2");
    service.SaveAnnotation(FieldGoalRequest(0, true, "ann-2"));
    service.SubmitVerdict(Verdict("val-1", true));
    service.UpdateWorkerQualification("val-3", {false, false, true});
    before = service.Snapshot();
  }
  AnnotationService replayed(ImportDropFile(kSample), config);
  Corpus after = replayed.Snapshot();
  CHECK(ExportCorpusToString(after) == ExportCorpusToString(before));
  CHECK(replayed.GetWorker("val-3").status == WorkerStatus::kRetraining);
  CHECK(replayed.GetWorker("ann-1").qualified());
  CHECK(replayed.NextTask("ann-1")["question"]["id"] == "q-empty");
  json verdict = replayed.SubmitVerdict(Verdict("val-2", true));
  CHECK(verdict["decision"] == "pending");
  CHECK(verdict["version"] == before.records.at("q-fg").version + 1);
  std::remove(log.c_str());
}

}  // namespace
}  // namespace trmr
