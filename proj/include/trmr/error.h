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

#ifndef TRMR_ERROR_H_
#define TRMR_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace trmr {

// Every failure raised by the toolkit carries one of these codes so callers
// (CLI, HTTP layer, tests) can dispatch without parsing messages.
enum class ErrorCode {
  // Expression language.
  kSyntaxError,
  kUnknownOperator,
  kArityError,
  kSpanNotInQuestion,
  kKindMismatch,
  kInvalidSpan,
  // Grounding and values.
  kUnparseableValue,
  kUnparseableCondition,
  kUnknownSuperlative,
  kUnitMismatch,
  kAmbiguousDate,
  // Derivation.
  kMissingSlot,
  kAmbiguousSelection,
  kMalformedPlan,
  kEmptyAnswer,
  // Dataset.
  kSchemaError,
  kDuplicateId,
  kIntegrityError,
  kQuestionMismatch,
  kNotFound,
  // Workflow.
  kDuplicateValidator,
  kTooManyVerdicts,
  kUnknownWorker,
  kNotQualified,
  kNoTasksAvailable,
  kVersionConflict,
  kInvalidTransition,
  kValidationFailed,
  kSelfValidation,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const { return code_; }

  // Message without the code prefix.
  const std::string &detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace trmr

#endif  // TRMR_ERROR_H_
