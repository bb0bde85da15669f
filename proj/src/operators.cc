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

#include "trmr/operators.h"

namespace trmr {

namespace {

SlotSpec Slot(const char *name, ValueKind kind, bool multi = true, bool required = true) {
  return SlotSpec{name, kind, required, multi};
}

SlotSpec Ungrounded() { return SlotSpec{"", ValueKind::kText, false, false}; }

std::vector<OperatorSig> BuildRegistry() {
  using VK = ValueKind;
  using RK = ResultKind;
  std::vector<OperatorSig> ops;

  auto binary_number = [&](const char *name) {
    ops.push_back({name, 2, false, SlotKind::kOrdinary, RK::kNumber, true,
                   {Slot("arg1", VK::kNumber), Slot("arg2", VK::kNumber)}, {}});
  };
  auto binary_select = [&](const char *name, VK kind) {
    bool multi = kind != VK::kDate;
    ops.push_back({name, 2, false, SlotKind::kOrdinary, RK::kEntity, false,
                   {Slot("arg1", kind, multi), Slot("arg2", kind, multi)}, {}});
  };
  auto binary_date = [&](const char *name) {
    ops.push_back({name, 2, false, SlotKind::kOrdinary, RK::kNumber, false,
                   {Slot("arg1", VK::kDate, false), Slot("arg2", VK::kDate, false)}, {}});
  };
  auto completion = [&](const char *name) {
    ops.push_back({name, 1, false, SlotKind::kOrdinary, RK::kNumber, false,
                   {Ungrounded()},
                   {Slot("target", VK::kNumber), Slot("complement", VK::kNumber)}});
  };

  // Arithmetic.
  binary_number("more");
  binary_select("more-select", VK::kNumber);
  binary_number("less");
  binary_select("less-select", VK::kNumber);
  ops.push_back({"cu", 1, false, SlotKind::kOrdinary, RK::kNumber, true,
                 {Slot("part", VK::kPercent)},
                 {Slot("whole", VK::kPercent, false, false)}});
  completion("completion-more");
  completion("completion-less");
  binary_date("after");
  binary_select("after-select", VK::kDate);
  binary_date("before");
  binary_select("before-select", VK::kDate);
  // Aggregate.
  ops.push_back({"sum", 2, true, SlotKind::kOrdinary, RK::kNumber, true,
                 {Slot("arg1", VK::kNumber)}, {}});
  ops.push_back({"count", 1, false, SlotKind::kOrdinary, RK::kNumber, true,
                 {Slot("items", VK::kText)}, {}});
  // Select.
  ops.push_back({"time-span", 1, false, SlotKind::kOrdinary, RK::kNumber, false,
                 {Ungrounded()},
                 {Slot("start", VK::kDate, false), Slot("end", VK::kDate, false)}});
  ops.push_back({"span", 1, false, SlotKind::kOrdinary, RK::kSpan, false,
                 {Slot("arg1", VK::kText, false)}, {}});
  // Sort and filter.
  ops.push_back({"sort", 2, false, SlotKind::kSuperlative, RK::kEntity, false,
                 {Ungrounded(), Slot("items", VK::kNumber)}, {}});
  ops.push_back({"filter", 2, false, SlotKind::kCondition, RK::kSpanList, false,
                 {Ungrounded(), Slot("items", VK::kNumber)}, {}});
  return ops;
}

}  // namespace

const char *ResultKindName(ResultKind kind) {
  switch (kind) {
    case ResultKind::kNumber: return "number";
    case ResultKind::kEntity: return "entity";
    case ResultKind::kSpan: return "span";
    case ResultKind::kSpanList: return "span_list";
  }
  return "?";
}

const char *ValueKindName(ValueKind kind) {
  switch (kind) {
    case ValueKind::kNumber: return "number";
    case ValueKind::kPercent: return "percent";
    case ValueKind::kDate: return "date";
    case ValueKind::kText: return "text";
  }
  return "?";
}

SlotSpec OperatorSig::ArgSlot(std::size_t position) const {
  if (position < arg_slots.size()) return arg_slots[position];
  if (!variadic || arg_slots.empty()) return Ungrounded();
  SlotSpec spec = arg_slots.back();
  spec.name = "arg" + std::to_string(position + 1);
  return spec;
}

std::span<const OperatorSig> Registry() {
  static const std::vector<OperatorSig> registry = BuildRegistry();
  return registry;
}

const OperatorSig *FindOperator(std::string_view name) {
  for (const OperatorSig &sig : Registry()) {
    if (sig.name == name) return &sig;
  }
  return nullptr;
}

bool IsGroundingSlotOf(const OperatorSig &sig, std::size_t arg_count,
                       std::string_view slot) {
  if (slot.empty()) return false;
  for (std::size_t i = 0; i < arg_count; ++i) {
    if (sig.ArgSlot(i).name == slot) return true;
  }
  for (const SlotSpec &spec : sig.extra_slots) {
    if (spec.name == slot) return true;
  }
  return false;
}

}  // namespace trmr
