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

#ifndef TRMR_DERIVATION_H_
#define TRMR_DERIVATION_H_

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "trmr/answer.h"
#include "trmr/grounding.h"
#include "trmr/tree.h"

namespace trmr {

// Anything a derivation step consumes or produces.
using StepValue =
    std::variant<NumberValue, PercentValue, Date, std::string, std::vector<std::string>>;

StepValue ToStepValue(const ParsedValue &value);
std::string StepValueToString(const StepValue &value);

struct StepInput {
  std::string label;
  // Entity the value stands for (question argument or item key).
  std::optional<std::string> key;
  StepValue value;
  // Index of an earlier step whose output this input reads; `value` then
  // holds a snapshot of that output.
  std::optional<std::size_t> ref;

  bool operator==(const StepInput &) const = default;
};

struct DerivationStep {
  std::string op;
  NodePath path;
  std::vector<StepInput> inputs;
  StepValue output;
  // "<op>: <inputs> → <output>"
  std::string rendered;

  bool operator==(const DerivationStep &) const = default;
};

struct DerivationPlan {
  // Leaves first; a step only references earlier steps.
  std::vector<DerivationStep> steps;
  Answer final;
  // Consistency warnings (negative differences); not errors.
  std::vector<std::string> warnings;

  bool operator==(const DerivationPlan &) const = default;

  // One rendered line per step.
  std::string Rendered() const;
};

struct RequiredSlot {
  NodePath path;
  std::string slot;
  ValueKind value_kind = ValueKind::kNumber;
  bool multi = true;

  bool operator==(const RequiredSlot &) const = default;
};

// Grounding slots execution will read, in pre-order. Optional slots (cu's
// "whole") are not listed.
std::vector<RequiredSlot> RequiredSlots(const TrmrTree &tree);

struct DeriveOptions {
  // Used by time-span to pick years / months / days.
  std::string question_text;
  const Lexicon *lexicon = nullptr;  // defaults to Lexicon::Default()
};

// The unit keyword time-span reports in: the first of years/months/days
// mentioned in the question, days when none is.
TimeUnit TimeSpanUnit(std::string_view question_text);

// Builds and evaluates one step per node, bottom-up. Errors carry the node
// path of the failing step.
DerivationPlan AutoDerive(const TrmrTree &tree, const Grounding &grounding,
                          const DeriveOptions &options = {});

// Re-evaluates every step from its (possibly edited) inputs, refreshing
// outputs, renderings, warnings and the final answer.
DerivationPlan Reexecute(const DerivationPlan &plan, const Lexicon &lexicon = Lexicon::Default());

Answer Execute(const DerivationPlan &plan, const Lexicon &lexicon = Lexicon::Default());

// Throws EmptyAnswer for an empty list.
Answer StepValueToAnswer(const StepValue &value);

std::string RenderStep(const DerivationStep &step);

nlohmann::json StepValueToJson(const StepValue &value);
StepValue StepValueFromJson(const nlohmann::json &json);
nlohmann::json PlanToJson(const DerivationPlan &plan);
DerivationPlan PlanFromJson(const nlohmann::json &json);

}  // namespace trmr

#endif  // TRMR_DERIVATION_H_
