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

#include <filesystem>

#include "httplib.h"
#include "trmr/derivation.h"
#include "trmr/metrics.h"

namespace trmr {

using nlohmann::json;

namespace {

json PassageJson(const Passage &p) { return json{{"id", p.id}, {"text", p.text}}; }

json RequiredSlotsJson(const TrmrTree &tree) {
  json slots = json::array();
  for (const RequiredSlot &s : RequiredSlots(tree)) {
    slots.push_back({{"path", s.path},
                     {"slot", s.slot},
                     {"value_kind", ValueKindName(s.value_kind)},
                     {"multi", s.multi}});
  }
  return slots;
}

// Edited plans may change step inputs but not the operator structure.
void CheckPlanShape(const TrmrTree &tree, const DerivationPlan &plan) {
  std::vector<std::pair<NodePath, std::string>> nodes;
  VisitNodesPostOrder(tree, [&](const NodePath &path, const TrmrTree &node) {
    nodes.emplace_back(path, node.op);
  });
  bool same = nodes.size() == plan.steps.size();
  for (std::size_t i = 0; same && i < nodes.size(); ++i) {
    same = plan.steps[i].path == nodes[i].first && plan.steps[i].op == nodes[i].second;
  }
  if (!same) {
    throw Error(ErrorCode::kMalformedPlan, "plan steps do not follow the tree's operators");
  }
}

bool Blocking(const ValidationReport &report) {
  for (const ValidationIssue &issue : report.issues) {
    if (issue.rule != Rule::kV4) return true;
  }
  return false;
}

void SetStatus(AnnotationRecord &record, RecordStatus to) {
  if (!IsAllowedTransition(record.status, to)) {
    throw Error(ErrorCode::kInvalidTransition,
                std::string(RecordStatusName(record.status)) + " -> " + RecordStatusName(to) +
                    " for " + record.id);
  }
  record.status = to;
  record.version++;
}

}  // namespace

ValidationFailed::ValidationFailed(ValidationReport report)
    : Error(ErrorCode::kValidationFailed,
            [&] {
              std::string rules;
              for (Rule r : report.Rules()) {
                rules += std::string(rules.empty() ? "" : " ") + RuleName(r);
              }
              return "annotation violates " + rules;
            }()),
      report_(std::move(report)) {}

AnnotationService::AnnotationService(Corpus corpus, ServiceConfig config)
    : corpus_(std::move(corpus)), config_(std::move(config)) {
  rng_.seed(config_.seed ? *config_.seed : std::random_device{}());
  for (const auto &[id, record] : corpus_.records) claims_[id] = record.annotator_id;
  if (!config_.event_log.empty()) {
    if (std::filesystem::exists(config_.event_log)) Replay();
    log_.open(config_.event_log, std::ios::app | std::ios::binary);
    if (!log_) throw Error(ErrorCode::kNotFound, "cannot open event log " + config_.event_log);
  }
}

void AnnotationService::Replay() {
  std::ifstream in(config_.event_log, std::ios::binary);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json event = json::parse(line);
      Apply(event);
      seq_ = std::max<std::uint64_t>(seq_, event.value("seq", std::uint64_t{0}));
    } catch (const json::exception &e) {
      throw Error(ErrorCode::kSchemaError,
                  config_.event_log + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  CheckIntegrity(corpus_);
}

void AnnotationService::Apply(const json &event) {
  const std::string type = event.at("event").get<std::string>();
  if (type == "worker") {
    WorkerProfile w = WorkerFromJson(event.at("worker"));
    workers_[w.worker_id] = w;
  } else if (type == "claim") {
    claims_[event.at("question_id").get<std::string>()] = event.at("worker_id").get<std::string>();
  } else if (event.contains("record")) {
    AnnotationRecord r = RecordFromJson(event["record"]);
    claims_[r.question_id] = r.annotator_id;
    corpus_.records[r.id] = std::move(r);
  } else {
    throw Error(ErrorCode::kSchemaError, "unknown event " + type);
  }
}

void AnnotationService::Log(json event) {
  event["seq"] = ++seq_;
  if (log_.is_open()) {
    log_ << event.dump() << "\n";
    log_.flush();
  }
}

const WorkerProfile &AnnotationService::Worker(const std::string &worker_id) const {
  auto it = workers_.find(worker_id);
  if (it == workers_.end()) throw Error(ErrorCode::kUnknownWorker, worker_id);
  return it->second;
}

WorkerProfile AnnotationService::RegisterWorker(const WorkerProfile &worker) {
  if (worker.worker_id.empty()) throw Error(ErrorCode::kSchemaError, "empty worker_id");
  std::lock_guard<std::mutex> lock(mu_);
  WorkerProfile w = worker;
  if (w.qualification_score >= config_.theta) {
    w.status = WorkerStatus::kQualified;
  } else if (w.status == WorkerStatus::kQualified) {
    w.status = WorkerStatus::kTraining;
  }
  workers_[w.worker_id] = w;
  Log({{"event", "worker"}, {"worker", WorkerToJson(w)}});
  return w;
}

WorkerProfile AnnotationService::UpdateWorkerQualification(const std::string &worker_id,
                                                           const std::vector<bool> &results) {
  std::lock_guard<std::mutex> lock(mu_);
  WorkerProfile w = UpdateQualification(Worker(worker_id), results, config_.theta);
  workers_[worker_id] = w;
  Log({{"event", "worker"}, {"worker", WorkerToJson(w)}});
  return w;
}

WorkerProfile AnnotationService::GetWorker(const std::string &worker_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return Worker(worker_id);
}

json AnnotationService::TaskJson(const char *kind, const Question &question,
                                 const AnnotationRecord *record, bool with_gold) const {
  json q = QuestionToJson(question);
  q.erase("type");
  if (!with_gold) q.erase("answer");
  json task{{"kind", kind},
            {"question", q},
            {"passage", PassageJson(corpus_.passage_of(question))}};
  if (record) task["record"] = RecordToJson(*record);
  return task;
}

json AnnotationService::NextTask(const std::string &worker_id) {
  std::lock_guard<std::mutex> lock(mu_);
  const WorkerProfile &w = Worker(worker_id);
  if (!w.qualified()) {
    throw Error(ErrorCode::kNotQualified, worker_id + " is " + WorkerStatusName(w.status));
  }
  if (w.role == WorkerRole::kAnnotator) {
    for (const auto &[id, r] : corpus_.records) {
      if (r.annotator_id == worker_id && r.status == RecordStatus::kNeedsRevision) {
        return TaskJson("revise", corpus_.question(r.question_id), &r, true);
      }
    }
    for (const auto &[id, r] : corpus_.records) {
      if (r.annotator_id == worker_id && r.status == RecordStatus::kDraft) {
        return TaskJson("annotate", corpus_.question(r.question_id), &r, true);
      }
    }
    for (const auto &[qid, holder] : claims_) {
      if (holder == worker_id && !corpus_.records.count(qid)) {
        return TaskJson("annotate", corpus_.question(qid), nullptr, true);
      }
    }
    for (const auto &[qid, q] : corpus_.questions) {
      if (claims_.count(qid)) continue;
      claims_[qid] = worker_id;
      Log({{"event", "claim"}, {"question_id", qid}, {"worker_id", worker_id}});
      return TaskJson("annotate", q, nullptr, true);
    }
    throw Error(ErrorCode::kNoTasksAvailable, "no open questions");
  }
  std::vector<const AnnotationRecord *> eligible;
  std::size_t own = 0;
  for (const auto &[id, r] : corpus_.records) {
    if (r.status != RecordStatus::kInValidation) continue;
    if (r.annotator_id == worker_id) {
      ++own;
      continue;
    }
    bool judged = false;
    for (const ValidationVerdict &v : r.verdicts) judged = judged || v.validator_id == worker_id;
    if (!judged && static_cast<int>(r.verdicts.size()) < config_.quorum.votes) {
      eligible.push_back(&r);
    }
  }
  if (eligible.empty()) {
    throw Error(ErrorCode::kNoTasksAvailable,
                own ? "only the worker's own records await validation"
                    : "no records await validation");
  }
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  const AnnotationRecord *r = eligible[pick(rng_)];
  return TaskJson("validate", corpus_.question(r->question_id), r, config_.validators_see_gold);
}

json AnnotationService::GetQuestion(const std::string &question_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  const Question &q = corpus_.question(question_id);
  json out = QuestionToJson(q);
  out.erase("type");
  return json{{"question", out}, {"passage", PassageJson(corpus_.passage_of(q))}};
}

json AnnotationService::GetRecord(const std::string &record_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = corpus_.records.find(record_id);
  if (it == corpus_.records.end()) throw Error(ErrorCode::kNotFound, "record " + record_id);
  return RecordToJson(it->second);
}

AnnotationService::Parsed AnnotationService::ParseBody(const Question &question,
                                                       const json &request) const try {
  Parsed p;
  if (request.contains("tree") && !request["tree"].is_null()) {
    p.tree = TreeFromJson(request["tree"]);
  } else if (request.contains("expression") && request["expression"].is_string()) {
    p.tree = ParseTrmrWithWarnings(request["expression"].get<std::string>(), question.text).tree;
  } else {
    throw Error(ErrorCode::kSchemaError, "request needs a tree or an expression");
  }
  p.grounding = GroundingFromJson(request.value("grounding", json::array()));
  if (request.contains("plan") && !request["plan"].is_null()) {
    p.plan = PlanFromJson(request["plan"]);
  }
  return p;
} catch (const json::exception &e) {
  throw Error(ErrorCode::kSchemaError, e.what());
}

json AnnotationService::SaveAnnotation(const json &request) {
  if (!request.is_object() || !request.contains("question_id") ||
      !request["question_id"].is_string() || !request.contains("annotator_id") ||
      !request["annotator_id"].is_string()) {
    throw Error(ErrorCode::kSchemaError, "request needs question_id and annotator_id");
  }
  const std::string qid = request["question_id"].get<std::string>();
  const std::string annotator = request["annotator_id"].get<std::string>();
  const std::uint64_t expected = request.value("version", std::uint64_t{0});
  const bool submit = request.value("submit", false);

  std::lock_guard<std::mutex> lock(mu_);
  const Question &question = corpus_.question(qid);
  const Passage &passage = corpus_.passage_of(question);
  const WorkerProfile &w = Worker(annotator);
  if (w.role != WorkerRole::kAnnotator || !w.qualified()) {
    throw Error(ErrorCode::kNotQualified, annotator + " may not annotate");
  }
  auto claim = claims_.find(qid);
  if (claim != claims_.end() && claim->second != annotator) {
    throw Error(ErrorCode::kInvalidTransition, qid + " is held by " + claim->second);
  }

  AnnotationRecord record;
  auto existing = corpus_.records.find(qid);
  if (existing != corpus_.records.end()) {
    record = existing->second;
    if (record.version != expected) {
      throw Error(ErrorCode::kVersionConflict, qid + " is at version " +
                                                   std::to_string(record.version) + ", not " +
                                                   std::to_string(expected));
    }
    if (record.status == RecordStatus::kNeedsRevision) {
      SetStatus(record, RecordStatus::kDraft);
      record.verdicts.clear();
    } else if (record.status != RecordStatus::kDraft) {
      throw Error(ErrorCode::kInvalidTransition,
                  qid + " is " + RecordStatusName(record.status) + " and cannot be edited");
    }
  } else if (expected != 0) {
    throw Error(ErrorCode::kVersionConflict, qid + " has no record yet; expected version 0");
  }

  Parsed body = ParseBody(question, request);
  CheckStructure(body.tree);
  Typecheck(body.tree);
  record.id = qid;
  record.question_id = qid;
  record.annotator_id = annotator;
  record.tree = body.tree;
  record.grounding = body.grounding;
  std::optional<Error> derive_error;
  try {
    if (body.plan) {
      CheckPlanShape(record.tree, *body.plan);
      record.plan = Reexecute(*body.plan, config_.lexicon);
    } else {
      record.plan = AutoDerive(record.tree, record.grounding, {question.text, &config_.lexicon});
    }
  } catch (const Error &e) {
    if (submit || e.code() == ErrorCode::kMalformedPlan) throw;
    derive_error = e;
    record.plan = DerivationPlan{};
    record.plan.warnings.push_back(std::string("not derivable yet: ") + e.what());
  }

  ValidationReport report = ValidateAnnotation(record, question, passage, config_.lexicon);
  if (derive_error) {
    std::erase_if(report.issues, [](const ValidationIssue &i) { return i.rule == Rule::kV4; });
    report.consistent = true;
  }
  record.consistency = report.consistent;
  if (submit && Blocking(report)) throw ValidationFailed(report);

  if (existing == corpus_.records.end() || !submit) record.version++;
  if (submit) {
    SetStatus(record, RecordStatus::kSubmitted);
    Log({{"event", "submit"}, {"actor", annotator}, {"record", RecordToJson(record)}});
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng_) < config_.sample_rate) {
      SetStatus(record, RecordStatus::kInValidation);
      Log({{"event", "validation_started"}, {"record", RecordToJson(record)}});
    }
  } else {
    Log({{"event", "save"}, {"actor", annotator}, {"record", RecordToJson(record)}});
  }
  claims_[qid] = annotator;
  corpus_.records[qid] = record;
  return json{{"record", RecordToJson(record)}, {"report", ValidationReportToJson(report)}};
}

json AnnotationService::Derive(const std::string &question_id, const json &request) const {
  std::lock_guard<std::mutex> lock(mu_);
  const Question &question = corpus_.question(question_id);
  Parsed body = ParseBody(question, request);
  CheckStructure(body.tree);
  Typecheck(body.tree);
  json out{{"required_slots", RequiredSlotsJson(body.tree)}};
  try {
    DerivationPlan plan;
    if (body.plan) {
      CheckPlanShape(body.tree, *body.plan);
      plan = Reexecute(*body.plan, config_.lexicon);
    } else {
      plan = AutoDerive(body.tree, body.grounding, {question.text, &config_.lexicon});
    }
    out["plan"] = PlanToJson(plan);
    out["rendered"] = plan.Rendered();
    out["final"] = AnswerToJson(plan.final);
    out["warnings"] = plan.warnings;
    out["error"] = nullptr;
  } catch (const Error &e) {
    out["plan"] = nullptr;
    out["error"] = {{"error", ErrorCodeName(e.code())}, {"detail", e.detail()}};
  }
  return out;
}

json AnnotationService::Locate(const json &request) const {
  std::lock_guard<std::mutex> lock(mu_);
  const Question &question = corpus_.question(request.at("question_id").get<std::string>());
  const std::string source = request.value("source", "passage");
  const std::string text = request.at("text").get<std::string>();
  if (text.empty()) throw Error(ErrorCode::kSchemaError, "empty text");
  std::vector<Span> spans;
  if (source == "question") {
    spans = LocateOccurrences(text, question.text, SpanSource::kQuestion);
  } else if (source == "passage") {
    spans = LocateOccurrences(text, corpus_.passage_of(question).text, SpanSource::kPassage);
  } else {
    throw Error(ErrorCode::kSchemaError, "source must be question or passage");
  }
  json out = json::array();
  for (const Span &s : spans) out.push_back(SpanToJson(s));
  return json{{"spans", out}};
}

json AnnotationService::SubmitVerdict(const json &request) {
  ValidationVerdict verdict = VerdictFromJson(request);
  std::lock_guard<std::mutex> lock(mu_);
  const WorkerProfile &w = Worker(verdict.validator_id);
  if (w.role != WorkerRole::kValidator || !w.qualified()) {
    throw Error(ErrorCode::kNotQualified, verdict.validator_id + " may not validate");
  }
  auto it = corpus_.records.find(verdict.record_id);
  if (it == corpus_.records.end()) throw Error(ErrorCode::kNotFound, "record " + verdict.record_id);
  AnnotationRecord record = it->second;
  if (request.contains("version") &&
      request["version"].get<std::uint64_t>() != record.version) {
    throw Error(ErrorCode::kVersionConflict,
                record.id + " is at version " + std::to_string(record.version));
  }
  if (record.annotator_id == verdict.validator_id) {
    throw Error(ErrorCode::kSelfValidation, verdict.validator_id + " annotated " + record.id);
  }
  if (record.status != RecordStatus::kInValidation) {
    throw Error(ErrorCode::kInvalidTransition,
                record.id + " is " + RecordStatusName(record.status) + ", not in validation");
  }
  std::vector<ValidationVerdict> verdicts = record.verdicts;
  verdicts.push_back(verdict);
  Decision decision = AggregateVotes(verdicts, config_.quorum);
  record.verdicts = std::move(verdicts);
  record.version++;
  Log({{"event", "verdict"},
       {"actor", verdict.validator_id},
       {"verdict", VerdictToJson(verdict)},
       {"record", RecordToJson(record)}});
  if (decision != Decision::kPending) {
    RecordStatus to = RecordStatus::kRejected;
    if (decision == Decision::kAccepted) {
      const Question &question = corpus_.question(record.question_id);
      ValidationReport report =
          ValidateAnnotation(record, question, corpus_.passage_of(question), config_.lexicon);
      record.consistency = report.consistent;
      to = Blocking(report) ? RecordStatus::kNeedsRevision : RecordStatus::kAccepted;
    }
    SetStatus(record, to);
    Log({{"event", "decision"},
         {"decision", DecisionName(decision)},
         {"record", RecordToJson(record)}});
  }
  it->second = record;
  return json{{"record_id", record.id},
              {"decision", DecisionName(decision)},
              {"status", RecordStatusName(record.status)},
              {"version", record.version}};
}

json AnnotationService::Stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  return StatsToJson(ComputeStats(corpus_, config_.quorum));
}

Corpus AnnotationService::Snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return corpus_;
}

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
    case ErrorCode::kUnknownWorker:
    case ErrorCode::kNoTasksAvailable:
      return 404;
    case ErrorCode::kNotQualified:
    case ErrorCode::kSelfValidation:
      return 403;
    case ErrorCode::kVersionConflict:
    case ErrorCode::kDuplicateValidator:
    case ErrorCode::kTooManyVerdicts:
    case ErrorCode::kInvalidTransition:
    case ErrorCode::kDuplicateId:
      return 409;
    case ErrorCode::kValidationFailed:
      return 422;
    case ErrorCode::kIntegrityError:
      return 500;
    default:
      return 400;
  }
}

namespace {

using Handler = std::function<json(const httplib::Request &)>;

void SendError(httplib::Response &res, ErrorCode code, const std::string &detail,
               const json *report = nullptr) {
  json body{{"error", ErrorCodeName(code)}, {"detail", detail}};
  if (report) body["report"] = *report;
  res.status = HttpStatusFor(code);
  res.set_content(body.dump(), "application/json");
}

httplib::Server::Handler Wrap(Handler handler) {
  return [handler = std::move(handler)](const httplib::Request &req, httplib::Response &res) {
    try {
      res.set_content(handler(req).dump(), "application/json");
    } catch (const ValidationFailed &e) {
      json report = ValidationReportToJson(e.report());
      SendError(res, e.code(), e.detail(), &report);
    } catch (const Error &e) {
      SendError(res, e.code(), e.detail());
    } catch (const json::exception &e) {
      SendError(res, ErrorCode::kSchemaError, e.what());
    }
  };
}

json Body(const httplib::Request &req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kSchemaError, std::string("request body: ") + e.what());
  }
}

}  // namespace

void InstallRoutes(httplib::Server &server, AnnotationService &service) {
  AnnotationService *s = &service;
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(".*", [](const httplib::Request &, httplib::Response &res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.Get("/tasks/next", Wrap([s](const httplib::Request &req) {
               if (!req.has_param("worker")) {
                 throw Error(ErrorCode::kSchemaError, "missing worker parameter");
               }
               return s->NextTask(req.get_param_value("worker"));
             }));
  server.Get(R"(/questions/([^/]+))", Wrap([s](const httplib::Request &req) {
               return s->GetQuestion(req.matches[1]);
             }));
  server.Post("/annotations",
              Wrap([s](const httplib::Request &req) { return s->SaveAnnotation(Body(req)); }));
  server.Post(R"(/annotations/([^/]+)/derive)", Wrap([s](const httplib::Request &req) {
                return s->Derive(req.matches[1], Body(req));
              }));
  server.Post("/verdicts",
              Wrap([s](const httplib::Request &req) { return s->SubmitVerdict(Body(req)); }));
  server.Get(R"(/records/([^/]+))", Wrap([s](const httplib::Request &req) {
               return s->GetRecord(req.matches[1]);
             }));
  server.Get("/stats", Wrap([s](const httplib::Request &) { return s->Stats(); }));
  server.Post("/workers", Wrap([s](const httplib::Request &req) {
                return WorkerToJson(s->RegisterWorker(WorkerFromJson(Body(req))));
              }));
  server.Get(R"(/workers/([^/]+))", Wrap([s](const httplib::Request &req) {
               return WorkerToJson(s->GetWorker(req.matches[1]));
             }));
  server.Post(R"(/workers/([^/]+)/qualification)", Wrap([s](const httplib::Request &req) {
                json body = Body(req);
                std::vector<bool> results = body.at("results").get<std::vector<bool>>();
                return WorkerToJson(s->UpdateWorkerQualification(req.matches[1], results));
              }));
  server.Post("/locate",
              Wrap([s](const httplib::Request &req) { return s->Locate(Body(req)); }));
}

}  // namespace trmr
