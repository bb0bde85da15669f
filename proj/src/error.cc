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

#include "trmr/error.h"

namespace trmr {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnknownOperator: return "UnknownOperator";
    case ErrorCode::kArityError: return "ArityError";
    case ErrorCode::kSpanNotInQuestion: return "SpanNotInQuestion";
    case ErrorCode::kKindMismatch: return "KindMismatch";
    case ErrorCode::kInvalidSpan: return "InvalidSpan";
    case ErrorCode::kUnparseableValue: return "UnparseableValue";
    case ErrorCode::kUnparseableCondition: return "UnparseableCondition";
    case ErrorCode::kUnknownSuperlative: return "UnknownSuperlative";
    case ErrorCode::kUnitMismatch: return "UnitMismatch";
    case ErrorCode::kAmbiguousDate: return "AmbiguousDate";
    case ErrorCode::kMissingSlot: return "MissingSlot";
    case ErrorCode::kAmbiguousSelection: return "AmbiguousSelection";
    case ErrorCode::kMalformedPlan: return "MalformedPlan";
    case ErrorCode::kEmptyAnswer: return "EmptyAnswer";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kIntegrityError: return "IntegrityError";
    case ErrorCode::kQuestionMismatch: return "QuestionMismatch";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kDuplicateValidator: return "DuplicateValidator";
    case ErrorCode::kTooManyVerdicts: return "TooManyVerdicts";
    case ErrorCode::kUnknownWorker: return "UnknownWorker";
    case ErrorCode::kNotQualified: return "NotQualified";
    case ErrorCode::kNoTasksAvailable: return "NoTasksAvailable";
    case ErrorCode::kVersionConflict: return "VersionConflict";
    case ErrorCode::kInvalidTransition: return "InvalidTransition";
    case ErrorCode::kValidationFailed: return "ValidationFailed";
    case ErrorCode::kSelfValidation: return "SelfValidation";
  }
  return "Unknown";
}

}  // namespace trmr
