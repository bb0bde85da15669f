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

#ifndef TRMR_OPERATORS_H_
#define TRMR_OPERATORS_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trmr {

// Role of an operator argument.
enum class SlotKind { kOrdinary, kSuperlative, kCondition };

// What a (sub)expression evaluates to.
enum class ResultKind { kNumber, kEntity, kSpan, kSpanList };

// What a grounding slot's spans are parsed as.
enum class ValueKind { kNumber, kPercent, kDate, kText };

const char *ResultKindName(ResultKind kind);
const char *ValueKindName(ValueKind kind);

// A named grounding input read at execution time.
struct SlotSpec {
  std::string name;
  ValueKind value_kind = ValueKind::kNumber;
  bool required = true;
  // More than one grounded item allowed (summed for arithmetic, or an item
  // list for count/sort/filter).
  bool multi = true;
};

struct OperatorSig {
  std::string name;
  std::size_t min_arity = 1;
  bool variadic = false;
  // Kind of the first argument; all later arguments are ordinary.
  SlotKind first_slot = SlotKind::kOrdinary;
  ResultKind result_kind = ResultKind::kNumber;
  // Whether a nested operation may stand in for an ordinary argument. When
  // it does, the argument's grounding slot is not read.
  bool accepts_nested = false;
  // Slot read for each ordinary question-span argument, by position. An
  // empty name means the argument is not grounded. Variadic operators reuse
  // the last entry's kind with an "arg<N>" name.
  std::vector<SlotSpec> arg_slots;
  // Slots read regardless of arguments.
  std::vector<SlotSpec> extra_slots;

  SlotKind slot_kind(std::size_t position) const {
    return position == 0 ? first_slot : SlotKind::kOrdinary;
  }
  bool ArityOk(std::size_t count) const {
    return variadic ? count >= min_arity : count == min_arity;
  }
  // Slot spec for an ordinary argument at `position`; name empty if the
  // argument is not grounded.
  SlotSpec ArgSlot(std::size_t position) const;
};

// The seventeen operators, in table order.
std::span<const OperatorSig> Registry();

// nullptr when `name` is not registered.
const OperatorSig *FindOperator(std::string_view name);

// Every slot name this operator may read (for key validation).
bool IsGroundingSlotOf(const OperatorSig &sig, std::size_t arg_count,
                       std::string_view slot);

}  // namespace trmr

#endif  // TRMR_OPERATORS_H_
