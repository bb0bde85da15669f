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

// Command-line front end. Reports go to stdout as JSON. Exit status is 0
// on success, 2 when the input fails validation and 1 on other errors.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "trmr/corpus.h"
#include "trmr/derivation.h"
#include "trmr/error.h"
#include "trmr/metrics.h"
#include "trmr/service.h"
#include "trmr/workflow.h"

namespace {

using nlohmann::json;
using trmr::Corpus;
using trmr::Error;
using trmr::ErrorCode;

constexpr int kValidationFailure = 2;

httplib::Server *g_server = nullptr;

void Print(const json &j) { std::cout << j.dump(2) << "\n"; }

bool IsValidationError(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaError:
    case ErrorCode::kDuplicateId:
    case ErrorCode::kIntegrityError:
    case ErrorCode::kValidationFailed:
      return true;
    default:
      return false;
  }
}

trmr::Lexicon LoadLexicon(const std::string &path) {
  return path.empty() ? trmr::Lexicon::Default() : trmr::Lexicon::LoadWithDefaults(path);
}

std::vector<trmr::Prediction> LoadPredictions(const std::string &path, const Corpus &corpus) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path);
  std::vector<json> rows;
  std::string first((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto start = first.find_first_not_of(" \t\r\n");
  try {
    if (start != std::string::npos && first[start] == '[') {
      for (const json &j : json::parse(first)) rows.push_back(j);
    } else {
      std::istringstream lines(first);
      std::string line;
      while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) rows.push_back(json::parse(line));
      }
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kSchemaError, path + ": " + e.what());
  }
  std::vector<trmr::Prediction> out;
  for (const json &j : rows) {
    const trmr::Question *q = nullptr;
    if (j.is_object() && j.contains("question_id") && j["question_id"].is_string()) {
      auto it = corpus.questions.find(j["question_id"].get<std::string>());
      if (it != corpus.questions.end()) q = &it->second;
    }
    out.push_back(trmr::PredictionFromJson(j, q));
  }
  return out;
}

int RunImport(const std::string &input, const std::string &output) {
  std::vector<std::string> warnings;
  Corpus corpus = trmr::ImportDropFile(input, &warnings);
  trmr::ExportCorpusFile(corpus, output);
  Print({{"passages", corpus.passages.size()},
         {"questions", corpus.questions.size()},
         {"output", output},
         {"warnings", warnings}});
  return 0;
}

int RunExport(const std::string &corpus_path, const std::string &events,
              const std::string &output) {
  Corpus corpus = trmr::LoadCorpusFile(corpus_path);
  if (!events.empty()) {
    trmr::ServiceConfig config;
    config.event_log = events;
    config.seed = 0;
    trmr::AnnotationService service(std::move(corpus), std::move(config));
    corpus = service.Snapshot();
  }
  if (output.empty() || output == "-") {
    trmr::ExportCorpus(corpus, std::cout);
  } else {
    trmr::ExportCorpusFile(corpus, output);
    Print({{"records", corpus.records.size()}, {"output", output}});
  }
  return 0;
}

int RunStats(const std::string &corpus_path, bool by_operator) {
  Print(trmr::StatsToJson(trmr::ComputeStats(trmr::LoadCorpusFile(corpus_path)), by_operator));
  return 0;
}

int RunScore(const std::string &predictions, const std::string &corpus_path) {
  Corpus corpus = trmr::LoadCorpusFile(corpus_path);
  Print(trmr::ScoreReportToJson(trmr::ScoreCorpus(LoadPredictions(predictions, corpus), corpus)));
  return 0;
}

int RunParse(const std::string &expression, const std::string &corpus_path,
             const std::string &question_id, const std::string &question_text) {
  std::string text = question_text;
  if (!question_id.empty()) {
    if (corpus_path.empty()) throw Error(ErrorCode::kNotFound, "--question needs --corpus");
    text = trmr::LoadCorpusFile(corpus_path).question(question_id).text;
  }
  if (text.empty()) throw Error(ErrorCode::kSchemaError, "give --question or --text");
  trmr::ParseResult parsed = trmr::ParseTrmrWithWarnings(expression, text);
  json slots = json::array();
  for (const trmr::RequiredSlot &s : trmr::RequiredSlots(parsed.tree)) {
    slots.push_back({{"path", trmr::FormatPath(s.path)},
                     {"slot", s.slot},
                     {"value_kind", trmr::ValueKindName(s.value_kind)}});
  }
  Print({{"expression", trmr::SerializeTrmr(parsed.tree)},
         {"kind", trmr::ResultKindName(trmr::Typecheck(parsed.tree))},
         {"tree", trmr::TreeToJson(parsed.tree)},
         {"required_slots", slots},
         {"warnings", parsed.warnings}});
  return 0;
}

int RunExec(const std::string &record_id, const std::string &corpus_path,
            const trmr::Lexicon &lexicon) {
  Corpus corpus = trmr::LoadCorpusFile(corpus_path);
  auto it = corpus.records.find(record_id);
  if (it == corpus.records.end()) throw Error(ErrorCode::kNotFound, "record " + record_id);
  const trmr::Question &question = corpus.question(it->second.question_id);
  trmr::DerivationPlan plan = trmr::Reexecute(it->second.plan, lexicon);
  json out{{"record_id", record_id},
           {"final", trmr::AnswerToJson(plan.final)},
           {"rendered", plan.Rendered()},
           {"warnings", plan.warnings},
           {"gold", question.answer ? trmr::AnswerToJson(*question.answer) : json(nullptr)}};
  if (question.answer) {
    bool match = trmr::AnswersMatch(plan.final, *question.answer);
    out["matches_gold"] = match;
  }
  Print(out);
  return 0;
}

int RunValidate(const std::string &corpus_path, const trmr::Lexicon &lexicon) {
  Corpus corpus;
  try {
    corpus = trmr::LoadCorpusFile(corpus_path);
  } catch (const Error &e) {
    if (!IsValidationError(e.code())) throw;
    Print({{"ok", false}, {"error", trmr::ErrorCodeName(e.code())}, {"detail", e.detail()}});
    return kValidationFailure;
  }
  json records = json::object();
  std::size_t failing = 0;
  for (const auto &[id, record] : corpus.records) {
    const trmr::Question &q = corpus.question(record.question_id);
    trmr::ValidationReport report =
        trmr::ValidateAnnotation(record, q, corpus.passage_of(q), lexicon);
    if (!report.ok()) {
      ++failing;
      records[id] = trmr::ValidationReportToJson(report);
    }
  }
  Print({{"ok", failing == 0},
         {"records", corpus.records.size()},
         {"failing", failing},
         {"issues", records}});
  return failing == 0 ? 0 : kValidationFailure;
}

struct ServeOptions {
  std::string corpus;
  std::string host = "127.0.0.1";
  int port = 8080;
  double theta = trmr::kDefaultQualificationThreshold;
  double sample_rate = 1.0;
  std::string events;
  std::string lexicon;
  bool validators_see_gold = false;
  bool early_decision = false;
  std::int64_t seed = -1;
};

int RunServe(const ServeOptions &o) {
  trmr::ServiceConfig config;
  config.theta = o.theta;
  config.sample_rate = o.sample_rate;
  config.validators_see_gold = o.validators_see_gold;
  config.quorum.early_decision = o.early_decision;
  if (o.seed >= 0) config.seed = static_cast<std::uint64_t>(o.seed);
  config.event_log = o.events.empty() ? o.corpus + ".events.jsonl" : o.events;
  config.lexicon = LoadLexicon(o.lexicon);
  trmr::AnnotationService service(trmr::LoadCorpusFile(o.corpus), std::move(config));

  httplib::Server server;
  trmr::InstallRoutes(server, service);
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::cerr << "serving " << o.corpus << " on " << o.host << ":" << o.port << "\n";
  if (!server.listen(o.host, o.port)) {
    std::cerr << "cannot listen on " << o.host << ":" << o.port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Toolkit for text reasoning meaning representations"};
  app.require_subcommand(1);
  std::string lexicon;
  app.add_option("--lexicon", lexicon, "Extra lexicon entries (phrase TAB value)")
      ->envname("TRMR_LEXICON");

  std::string drop_file, output;
  auto *import = app.add_subcommand("import", "Import a DROP-style file into a corpus");
  import->add_option("drop-file", drop_file)->required();
  import->add_option("-o,--output", output, "Corpus file to write")->required();

  std::string corpus, events;
  auto *exp = app.add_subcommand("export", "Write the canonical corpus file");
  exp->add_option("corpus", corpus)->required();
  exp->add_option("--events", events, "Event log to replay on top of the corpus");
  exp->add_option("-o,--output", output, "Output file, stdout when omitted");

  bool by_operator = false;
  auto *stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("corpus", corpus)->required();
  stats->add_flag("--by-operator", by_operator, "Include the per-operator breakdown");

  std::string predictions;
  auto *score = app.add_subcommand("score", "Score predictions against a corpus");
  score->add_option("pred-file", predictions)->required();
  score->add_option("corpus", corpus)->required();

  std::string expression, question_id, question_text;
  auto *parse = app.add_subcommand("parse", "Parse and typecheck an expression");
  parse->add_option("expression", expression)->required();
  parse->add_option("--question", question_id, "Question id in --corpus");
  parse->add_option("--text", question_text, "Question text");
  parse->add_option("--corpus", corpus)->envname("TRMR_CORPUS");

  std::string record_id;
  auto *exec = app.add_subcommand("exec", "Re-execute a record's derivation");
  exec->add_option("record-id", record_id)->required();
  exec->add_option("--corpus", corpus)->envname("TRMR_CORPUS")->required();

  auto *validate = app.add_subcommand("validate", "Check every record against V1-V5");
  validate->add_option("corpus", corpus)->required();

  ServeOptions serve_options;
  auto *serve = app.add_subcommand("serve", "Run the annotation service");
  serve->add_option("--corpus", serve_options.corpus)->envname("TRMR_CORPUS")->required();
  serve->add_option("--host", serve_options.host)->envname("TRMR_HOST");
  serve->add_option("--port", serve_options.port)->envname("TRMR_PORT");
  serve->add_option("--theta", serve_options.theta, "Qualification threshold")
      ->envname("TRMR_THETA")
      ->check(CLI::Range(0.0, 1.0));
  serve->add_option("--sample-rate", serve_options.sample_rate, "Validation sampling rate")
      ->envname("TRMR_SAMPLE_RATE")
      ->check(CLI::Range(0.0, 1.0));
  serve->add_option("--events", serve_options.events, "Event log, default <corpus>.events.jsonl")
      ->envname("TRMR_EVENTS");
  serve->add_option("--seed", serve_options.seed, "Task sampling seed")->envname("TRMR_SEED");
  serve->add_flag("--validators-see-gold", serve_options.validators_see_gold)
      ->envname("TRMR_VALIDATORS_SEE_GOLD");
  serve->add_flag("--early-decision", serve_options.early_decision,
                  "Decide once a majority agrees")
      ->envname("TRMR_EARLY_DECISION");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*import) return RunImport(drop_file, output);
    if (*exp) return RunExport(corpus, events, output);
    if (*stats) return RunStats(corpus, by_operator);
    if (*score) return RunScore(predictions, corpus);
    if (*parse) return RunParse(expression, corpus, question_id, question_text);
    if (*exec) return RunExec(record_id, corpus, LoadLexicon(lexicon));
    if (*validate) return RunValidate(corpus, LoadLexicon(lexicon));
    if (*serve) {
      serve_options.lexicon = lexicon;
      return RunServe(serve_options);
    }
  } catch (const Error &e) {
    Print({{"error", trmr::ErrorCodeName(e.code())}, {"detail", e.detail()}});
    std::cerr << e.what() << "\n";
    return IsValidationError(e.code()) ? kValidationFailure : 1;
  }
  return 0;
}
