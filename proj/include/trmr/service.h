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

#ifndef TRMR_SERVICE_H_
#define TRMR_SERVICE_H_

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "trmr/corpus.h"
#include "trmr/error.h"
#include "trmr/grounding.h"
#include "trmr/workflow.h"

namespace httplib {
class Server;
}

namespace trmr {

struct ServiceConfig {
  double theta = kDefaultQualificationThreshold;
  // Probability that a submitted record enters validation.
  double sample_rate = 1.0;
  bool validators_see_gold = false;
  QuorumPolicy quorum;
  // Unset means seeded from std::random_device.
  std::optional<std::uint64_t> seed;
  // Append-only event log; replayed on construction when it exists.
  std::string event_log;
  Lexicon lexicon = Lexicon::Default();
};

// Thrown on submission when V1, V2, V3 or V5 fail.
class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(ValidationReport report);
  const ValidationReport &report() const { return report_; }

 private:
  ValidationReport report_;
};

// The annotation workflow backend. All public methods are thread-safe;
// record mutations are checked against the caller's expected version.
//
// Request and response bodies are the JSON forms used over HTTP:
//
//   SaveAnnotation  {"question_id", "annotator_id", "version",
//                    "expression" | "tree", "grounding", "plan"?,
//                    "submit"?}
//   Derive          {"expression" | "tree", "grounding", "plan"?}
//   SubmitVerdict   {"record_id", "validator_id", "verdict", "note"?,
//                    "version"?}
class AnnotationService {
 public:
  AnnotationService(Corpus corpus, ServiceConfig config);

  AnnotationService(const AnnotationService &) = delete;
  AnnotationService &operator=(const AnnotationService &) = delete;

  const ServiceConfig &config() const { return config_; }

  // Adds or replaces a worker. New workers start in training unless the
  // profile says otherwise.
  WorkerProfile RegisterWorker(const WorkerProfile &worker);
  WorkerProfile UpdateWorkerQualification(const std::string &worker_id,
                                          const std::vector<bool> &test_results);
  WorkerProfile GetWorker(const std::string &worker_id) const;

  // Annotators get their oldest record awaiting revision, then the
  // question they already hold, then the first unclaimed question by id.
  // Validators get a uniformly random record in validation that they did
  // not annotate and have not judged. Throws UnknownWorker, NotQualified,
  // NoTasksAvailable.
  nlohmann::json NextTask(const std::string &worker_id);

  nlohmann::json GetQuestion(const std::string &question_id) const;
  nlohmann::json GetRecord(const std::string &record_id) const;

  // Returns {"record", "report"}. Throws VersionConflict,
  // InvalidTransition, ValidationFailed and parse errors.
  nlohmann::json SaveAnnotation(const nlohmann::json &request);

  // Auto-derivation preview; nothing is stored. Returns {"plan",
  // "rendered", "final", "warnings", "required_slots"}.
  nlohmann::json Derive(const std::string &question_id, const nlohmann::json &request) const;

  // {"question_id", "source": "question"|"passage", "text"} → spans.
  nlohmann::json Locate(const nlohmann::json &request) const;

  // Returns {"record_id", "decision", "status", "version"}.
  nlohmann::json SubmitVerdict(const nlohmann::json &request);

  nlohmann::json Stats() const;
  Corpus Snapshot() const;

 private:
  struct Parsed {
    TrmrTree tree;
    Grounding grounding;
    std::optional<DerivationPlan> plan;
  };

  Parsed ParseBody(const Question &question, const nlohmann::json &request) const;
  const WorkerProfile &Worker(const std::string &worker_id) const;
  void Log(nlohmann::json event);
  void Replay();
  void Apply(const nlohmann::json &event);
  nlohmann::json TaskJson(const char *kind, const Question &question,
                          const AnnotationRecord *record, bool with_gold) const;

  mutable std::mutex mu_;
  Corpus corpus_;
  ServiceConfig config_;
  std::map<std::string, WorkerProfile> workers_;
  // question id → annotator holding it.
  std::map<std::string, std::string> claims_;
  std::mt19937_64 rng_;
  std::ofstream log_;
  std::uint64_t seq_ = 0;
};

// Maps an error code to an HTTP status.
int HttpStatusFor(ErrorCode code);

// Installs the HTTP API on `server`:
//   GET  /tasks/next?worker=ID
//   GET  /questions/{id}
//   POST /annotations
//   POST /annotations/{id}/derive
//   POST /verdicts
//   GET  /records/{id}
//   GET  /stats
//   POST /workers
//   GET  /workers/{id}
//   POST /workers/{id}/qualification   {"results": [true, false, ...]}
//   POST /locate
// Errors come back as {"error": code name, "detail": text}, plus
// "report" for validation failures.
void InstallRoutes(httplib::Server &server, AnnotationService &service);

}  // namespace trmr

#endif  // TRMR_SERVICE_H_
