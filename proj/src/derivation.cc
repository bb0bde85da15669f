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

#include "trmr/derivation.h"

#include <algorithm>
#include <cctype>
#include <map>

#include "trmr/error.h"

namespace trmr {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Step values.

StepValue ToStepValue(const ParsedValue &value) {
  return std::visit([](const auto &v) -> StepValue { return v; }, value);
}

namespace {

std::string Quote(const std::string &text) { return "\"" + text + "\""; }

}  // namespace

std::string StepValueToString(const StepValue &value) {
  struct Visitor {
    std::string operator()(const NumberValue &v) const { return ParsedValueToString(v); }
    std::string operator()(const PercentValue &v) const { return ParsedValueToString(v); }
    std::string operator()(const Date &v) const { return v.ToString(); }
    std::string operator()(const std::string &v) const { return Quote(v); }
    std::string operator()(const std::vector<std::string> &v) const {
      std::string out = "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += Quote(v[i]);
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, value);
}

Answer StepValueToAnswer(const StepValue &value) {
  if (const auto *n = std::get_if<NumberValue>(&value)) return NumberAnswer{n->value};
  if (const auto *p = std::get_if<PercentValue>(&value)) return NumberAnswer{p->value};
  if (const auto *d = std::get_if<Date>(&value)) return DateAnswer{*d};
  if (const auto *s = std::get_if<std::string>(&value)) return SpanAnswer{{*s}};
  const auto &list = std::get<std::vector<std::string>>(value);
  if (list.empty()) throw Error(ErrorCode::kEmptyAnswer, "final step produced an empty list");
  return SpanAnswer{list};
}

std::string RenderStep(const DerivationStep &step) {
  std::string out = step.op + ":";
  for (std::size_t i = 0; i < step.inputs.size(); ++i) {
    const StepInput &in = step.inputs[i];
    out += i ? ", " : " ";
    out += in.label + "=";
    if (in.ref) out += "step " + std::to_string(*in.ref + 1) + " ";
    std::string value = StepValueToString(in.value);
    if (in.key && Quote(*in.key) != value) {
      out += Quote(*in.key) + " (" + value + ")";
    } else {
      out += value;
    }
  }
  return out + " → " + StepValueToString(step.output);
}

std::string DerivationPlan::Rendered() const {
  std::string out;
  for (const DerivationStep &step : steps) out += step.rendered + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Slot table.

std::vector<RequiredSlot> RequiredSlots(const TrmrTree &tree) {
  std::vector<RequiredSlot> slots;
  VisitNodes(tree, [&](const NodePath &path, const TrmrTree &node) {
    const OperatorSig *sig = FindOperator(node.op);
    if (sig == nullptr) return;
    for (std::size_t i = 0; i < node.args.size(); ++i) {
      if (!node.args[i].is_span() || sig->slot_kind(i) != SlotKind::kOrdinary) continue;
      SlotSpec spec = sig->ArgSlot(i);
      if (spec.name.empty() || !spec.required) continue;
      slots.push_back({path, spec.name, spec.value_kind, spec.multi});
    }
    for (const SlotSpec &spec : sig->extra_slots) {
      if (spec.required) slots.push_back({path, spec.name, spec.value_kind, spec.multi});
    }
  });
  return slots;
}

TimeUnit TimeSpanUnit(std::string_view question_text) {
  std::string lower(question_text);
  for (char &c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::size_t best = std::string::npos;
  TimeUnit unit = TimeUnit::kDays;
  for (TimeUnit candidate : {TimeUnit::kYears, TimeUnit::kMonths, TimeUnit::kDays}) {
    std::string word = TimeUnitName(candidate);
    word.pop_back();  // singular stem also matches the plural
    for (std::size_t at = lower.find(word); at != std::string::npos;
         at = lower.find(word, at + 1)) {
      bool left = at == 0 || !std::isalpha(static_cast<unsigned char>(lower[at - 1]));
      std::size_t end = at + word.size();
      if (end < lower.size() && lower[end] == 's') ++end;
      bool right = end == lower.size() || !std::isalpha(static_cast<unsigned char>(lower[end]));
      if (left && right) {
        if (at < best) {
          best = at;
          unit = candidate;
        }
        break;
      }
    }
  }
  return unit;
}

// ---------------------------------------------------------------------------
// Operator semantics.

namespace {

using Inputs = std::vector<StepInput>;

std::vector<const StepInput *> WithLabel(const Inputs &inputs, std::string_view label) {
  std::vector<const StepInput *> out;
  for (const StepInput &in : inputs) {
    if (in.label == label) out.push_back(&in);
  }
  return out;
}

[[noreturn]] void Missing(std::string_view label) {
  throw Error(ErrorCode::kMissingSlot, "no input for '" + std::string(label) + "'");
}

Quantity QuantityOf(const StepInput &in) {
  if (const auto *n = std::get_if<NumberValue>(&in.value)) return {n->value, n->unit};
  if (const auto *p = std::get_if<PercentValue>(&in.value)) return {p->value, "%"};
  throw Error(ErrorCode::kMalformedPlan,
              "input '" + in.label + "' is not numeric: " + StepValueToString(in.value));
}

Date DateOf(const StepInput &in) {
  if (const auto *d = std::get_if<Date>(&in.value)) return *d;
  throw Error(ErrorCode::kMalformedPlan,
              "input '" + in.label + "' is not a date: " + StepValueToString(in.value));
}

const std::string &TextOf(const StepInput &in) {
  if (const auto *s = std::get_if<std::string>(&in.value)) return *s;
  throw Error(ErrorCode::kMalformedPlan,
              "input '" + in.label + "' is not text: " + StepValueToString(in.value));
}

// Sum of a list of numeric inputs; units must agree.
Quantity Total(const std::vector<const StepInput *> &inputs) {
  Quantity total{Decimal(), ""};
  for (const StepInput *in : inputs) {
    Quantity q = QuantityOf(*in);
    total.unit = CheckUnits(total.unit, q.unit);
    total.value += q.value;
  }
  return total;
}

Quantity SlotTotal(const Inputs &inputs, std::string_view label) {
  auto selected = WithLabel(inputs, label);
  if (selected.empty()) Missing(label);
  return Total(selected);
}

const StepInput &Single(const Inputs &inputs, std::string_view label) {
  auto selected = WithLabel(inputs, label);
  if (selected.empty()) Missing(label);
  if (selected.size() > 1) {
    throw Error(ErrorCode::kMalformedPlan, "'" + std::string(label) + "' takes one value");
  }
  return *selected.front();
}

StepValue MakeQuantity(Decimal value, const std::string &unit) {
  if (NormalizeUnit(unit) == "%") return PercentValue{value};
  return NumberValue{value, unit};
}

std::string KeyOf(const StepInput &in) { return in.key ? *in.key : in.label; }

void WarnIfNegative(Decimal value, std::vector<std::string> *warnings) {
  if (value.IsNegative()) {
    warnings->push_back("negative result " + value.ToString() +
                        "; arguments may be swapped");
  }
}

StepValue Difference(const Inputs &inputs, std::string_view plus, std::string_view minus) {
  Quantity a = SlotTotal(inputs, plus);
  Quantity b = SlotTotal(inputs, minus);
  std::string unit = CheckUnits(a.unit, b.unit);
  return MakeQuantity(a.value - b.value, unit);
}

StepValue SelectByValue(const Inputs &inputs, bool larger) {
  auto first = WithLabel(inputs, "arg1");
  auto second = WithLabel(inputs, "arg2");
  if (first.empty()) Missing("arg1");
  if (second.empty()) Missing("arg2");
  Quantity a = Total(first);
  Quantity b = Total(second);
  CheckUnits(a.unit, b.unit);
  if (a.value == b.value) {
    throw Error(ErrorCode::kAmbiguousSelection,
                KeyOf(*first.front()) + " and " + KeyOf(*second.front()) + " tie at " +
                    a.value.ToString());
  }
  bool pick_first = larger ? a.value > b.value : a.value < b.value;
  return KeyOf(*(pick_first ? first : second).front());
}

StepValue SelectByDate(const Inputs &inputs, bool later) {
  const StepInput &first = Single(inputs, "arg1");
  const StepInput &second = Single(inputs, "arg2");
  int order = CompareDates(DateOf(first), DateOf(second));
  if (order == 0) {
    throw Error(ErrorCode::kAmbiguousSelection,
                KeyOf(first) + " and " + KeyOf(second) + " share a date");
  }
  bool pick_first = later ? order > 0 : order < 0;
  return KeyOf(pick_first ? first : second);
}

StepValue DayDifference(const Inputs &inputs, bool after, std::vector<std::string> *warnings) {
  Date first = DateOf(Single(inputs, "arg1"));
  Date second = DateOf(Single(inputs, "arg2"));
  std::int64_t days = after ? DateDifference(first, second, TimeUnit::kDays)
                            : DateDifference(second, first, TimeUnit::kDays);
  Decimal value = Decimal::FromInt(days);
  WarnIfNegative(value, warnings);
  return NumberValue{value, "days"};
}

StepValue Evaluate(const std::string &op, const Inputs &inputs, const Lexicon &lexicon,
                   std::vector<std::string> *warnings) {
  if (op == "more") return Difference(inputs, "arg1", "arg2");
  if (op == "less") return Difference(inputs, "arg2", "arg1");
  if (op == "more-select") return SelectByValue(inputs, true);
  if (op == "less-select") return SelectByValue(inputs, false);
  if (op == "cu") {
    Quantity part = SlotTotal(inputs, "part");
    Quantity whole{Decimal::FromInt(100), "%"};
    if (!WithLabel(inputs, "whole").empty()) whole = SlotTotal(inputs, "whole");
    std::string unit = CheckUnits(whole.unit, part.unit);
    return MakeQuantity(whole.value - part.value, unit);
  }
  if (op == "completion-more" || op == "completion-less") {
    StepValue out = op == "completion-more" ? Difference(inputs, "target", "complement")
                                            : Difference(inputs, "complement", "target");
    Decimal value = std::holds_alternative<NumberValue>(out) ? std::get<NumberValue>(out).value
                                                             : std::get<PercentValue>(out).value;
    WarnIfNegative(value, warnings);
    return out;
  }
  if (op == "after") return DayDifference(inputs, true, warnings);
  if (op == "before") return DayDifference(inputs, false, warnings);
  if (op == "after-select") return SelectByDate(inputs, true);
  if (op == "before-select") return SelectByDate(inputs, false);
  if (op == "sum") {
    std::vector<const StepInput *> terms;
    for (const StepInput &in : inputs) {
      if (in.label.rfind("arg", 0) == 0) terms.push_back(&in);
    }
    if (terms.empty()) Missing("arg1");
    Quantity total = Total(terms);
    return MakeQuantity(total.value, total.unit);
  }
  if (op == "count") {
    auto items = WithLabel(inputs, "items");
    if (items.empty()) Missing("items");
    std::int64_t n = 0;
    for (const StepInput *in : items) {
      const auto *list = std::get_if<std::vector<std::string>>(&in->value);
      n += list ? static_cast<std::int64_t>(list->size()) : 1;
    }
    return NumberValue{Decimal::FromInt(n), ""};
  }
  if (op == "time-span") {
    Date start = DateOf(Single(inputs, "start"));
    Date end = DateOf(Single(inputs, "end"));
    TimeUnit unit = TimeUnit::kDays;
    if (auto units = WithLabel(inputs, "unit"); !units.empty()) {
      auto parsed = TimeUnitFromName(TextOf(*units.front()));
      if (!parsed) throw Error(ErrorCode::kMalformedPlan, "unknown time unit");
      unit = *parsed;
    }
    Decimal value = Decimal::FromInt(DateDifference(start, end, unit));
    WarnIfNegative(value, warnings);
    return NumberValue{value, TimeUnitName(unit)};
  }
  if (op == "span") return TextOf(Single(inputs, "arg1"));
  if (op == "sort") {
    Polarity polarity = SuperlativePolarity(TextOf(Single(inputs, "superlative")), lexicon);
    auto items = WithLabel(inputs, "items");
    if (items.empty()) Missing("items");
    std::string unit;
    const StepInput *best = nullptr;
    Decimal best_value;
    int ties = 0;
    for (const StepInput *in : items) {
      Quantity q = QuantityOf(*in);
      unit = CheckUnits(unit, q.unit);
      bool better = best == nullptr ||
                    (polarity == Polarity::kMax ? q.value > best_value : q.value < best_value);
      if (better) {
        best = in;
        best_value = q.value;
        ties = 0;
      } else if (q.value == best_value) {
        ++ties;
      }
    }
    if (ties > 0) {
      throw Error(ErrorCode::kAmbiguousSelection,
                  std::to_string(ties + 1) + " items share the " + PolarityName(polarity) +
                      " value " + best_value.ToString());
    }
    return KeyOf(*best);
  }
  if (op == "filter") {
    Condition condition = ParseCondition(TextOf(Single(inputs, "condition")), lexicon);
    auto items = WithLabel(inputs, "items");
    if (items.empty()) Missing("items");
    std::vector<std::string> kept;
    for (const StepInput *in : items) {
      if (condition.Holds(QuantityOf(*in))) kept.push_back(KeyOf(*in));
    }
    return kept;
  }
  throw Error(ErrorCode::kUnknownOperator, "'" + op + "'");
}

Error AtStep(const Error &e, const std::string &op, const NodePath &path) {
  return Error(e.code(), op + " at " + FormatPath(path) + ": " + e.detail());
}

// Fills output and rendering of `step`, resolving refs against `done`.
void FinishStep(DerivationStep &step, const std::vector<DerivationStep> &done,
                const Lexicon &lexicon, std::vector<std::string> *warnings) {
  for (StepInput &in : step.inputs) {
    if (!in.ref) continue;
    if (*in.ref >= done.size()) {
      throw Error(ErrorCode::kMalformedPlan,
                  "step " + std::to_string(done.size() + 1) + " references step " +
                      std::to_string(*in.ref + 1));
    }
    in.value = done[*in.ref].output;
  }
  std::vector<std::string> local;
  try {
    step.output = Evaluate(step.op, step.inputs, lexicon, &local);
  } catch (const Error &e) {
    throw AtStep(e, step.op, step.path);
  }
  for (std::string &w : local) {
    warnings->push_back(step.op + " at " + FormatPath(step.path) + ": " + w);
  }
  step.rendered = RenderStep(step);
}

bool SelectsArgument(const std::string &op) {
  return op == "more-select" || op == "less-select" || op == "after-select" ||
         op == "before-select";
}

}  // namespace

// ---------------------------------------------------------------------------
// Derivation.

DerivationPlan AutoDerive(const TrmrTree &tree, const Grounding &grounding,
                          const DeriveOptions &options) {
  Typecheck(tree);
  const Lexicon &lexicon = options.lexicon ? *options.lexicon : Lexicon::Default();

  std::vector<DerivationStep> steps;
  std::vector<std::string> warnings;
  std::map<NodePath, std::size_t> step_of;

  VisitNodesPostOrder(tree, [&](const NodePath &path, const TrmrTree &node) {
    const OperatorSig &sig = *FindOperator(node.op);
    DerivationStep step;
    step.op = node.op;
    step.path = path;

    auto add_slot = [&](const SlotSpec &spec, const std::optional<std::string> &arg_text) {
      const std::vector<GroundedItem> *items = grounding.Find(path, spec.name);
      if (items == nullptr || items->empty()) {
        if (!spec.required) return;
        throw Error(ErrorCode::kMissingSlot,
                    node.op + " at " + FormatPath(path) + ": slot '" + spec.name + "' is empty");
      }
      if (!spec.multi && items->size() > 1) {
        throw Error(ErrorCode::kMalformedPlan, node.op + " at " + FormatPath(path) +
                                                   ": slot '" + spec.name + "' takes one item");
      }
      for (const GroundedItem &item : *items) {
        StepInput in;
        in.label = spec.name;
        if (SelectsArgument(node.op) && arg_text) {
          in.key = *arg_text;
        } else if (spec.name == "items" || item.key_span) {
          in.key = item.KeyText();
        } else if (arg_text) {
          in.key = *arg_text;
        }
        if (spec.value_kind == ValueKind::kText) {
          in.value = item.value_span.text;
        } else {
          try {
            in.value = ToStepValue(ExtractValue(item.value_span.text, spec.value_kind));
          } catch (const Error &e) {
            throw AtStep(e, node.op, path);
          }
        }
        step.inputs.push_back(std::move(in));
      }
    };

    for (std::size_t i = 0; i < node.args.size(); ++i) {
      const TrmrArg &arg = node.args[i];
      SlotKind kind = sig.slot_kind(i);
      if (!arg.is_span()) {
        NodePath child = path;
        child.push_back(i);
        std::size_t ref = step_of.at(child);
        std::string label = node.op == "count" ? "items" : sig.ArgSlot(i).name;
        if (label.empty()) label = "arg" + std::to_string(i + 1);
        step.inputs.push_back({label, std::nullopt, steps[ref].output, ref});
        continue;
      }
      const std::string &text = arg.span().text;
      if (kind == SlotKind::kSuperlative) {
        step.inputs.push_back({"superlative", std::nullopt, text, std::nullopt});
      } else if (kind == SlotKind::kCondition) {
        step.inputs.push_back({"condition", std::nullopt, text, std::nullopt});
      } else if (SlotSpec spec = sig.ArgSlot(i); spec.name.empty()) {
        step.inputs.push_back({"subject", std::nullopt, text, std::nullopt});
      } else {
        add_slot(spec, text);
      }
    }
    for (const SlotSpec &spec : sig.extra_slots) add_slot(spec, std::nullopt);
    if (node.op == "time-span") {
      step.inputs.push_back({"unit", std::nullopt,
                             std::string(TimeUnitName(TimeSpanUnit(options.question_text))),
                             std::nullopt});
    }

    FinishStep(step, steps, lexicon, &warnings);
    step_of[path] = steps.size();
    steps.push_back(std::move(step));
  });

  DerivationPlan plan{std::move(steps), NumberAnswer{}, std::move(warnings)};
  plan.final = StepValueToAnswer(plan.steps.back().output);
  return plan;
}

DerivationPlan Reexecute(const DerivationPlan &plan, const Lexicon &lexicon) {
  if (plan.steps.empty()) throw Error(ErrorCode::kMalformedPlan, "plan has no steps");
  DerivationPlan out;
  for (const DerivationStep &original : plan.steps) {
    DerivationStep step = original;
    FinishStep(step, out.steps, lexicon, &out.warnings);
    out.steps.push_back(std::move(step));
  }
  out.final = StepValueToAnswer(out.steps.back().output);
  return out;
}

Answer Execute(const DerivationPlan &plan, const Lexicon &lexicon) {
  return Reexecute(plan, lexicon).final;
}

// ---------------------------------------------------------------------------
// Structured form.

json StepValueToJson(const StepValue &value) {
  if (const auto *n = std::get_if<NumberValue>(&value)) {
    json j{{"type", "number"}, {"value", n->value.ToString()}};
    if (!n->unit.empty()) j["unit"] = n->unit;
    return j;
  }
  if (const auto *p = std::get_if<PercentValue>(&value)) {
    return json{{"type", "percent"}, {"value", p->value.ToString()}};
  }
  if (const auto *d = std::get_if<Date>(&value)) {
    json j = DateToJson(*d);
    j["type"] = "date";
    return j;
  }
  if (const auto *s = std::get_if<std::string>(&value)) {
    return json{{"type", "text"}, {"value", *s}};
  }
  return json{{"type", "list"}, {"value", std::get<std::vector<std::string>>(value)}};
}

namespace {

Decimal DecimalField(const json &j) {
  if (j.contains("value") && j["value"].is_string()) {
    if (auto d = Decimal::Parse(j["value"].get<std::string>())) return *d;
  }
  throw Error(ErrorCode::kSchemaError, "numeric value must be a decimal string: " + j.dump());
}

}  // namespace

StepValue StepValueFromJson(const json &j) {
  std::string type = j.is_object() ? j.value("type", "") : "";
  if (type == "number") return NumberValue{DecimalField(j), j.value("unit", "")};
  if (type == "percent") return PercentValue{DecimalField(j)};
  if (type == "date") return DateFromJson(j);
  if (type == "text" && j.contains("value") && j["value"].is_string()) {
    return j["value"].get<std::string>();
  }
  if (type == "list" && j.contains("value") && j["value"].is_array()) {
    return j["value"].get<std::vector<std::string>>();
  }
  throw Error(ErrorCode::kSchemaError, "bad step value: " + j.dump());
}

json PlanToJson(const DerivationPlan &plan) {
  json steps = json::array();
  for (const DerivationStep &step : plan.steps) {
    json inputs = json::array();
    for (const StepInput &in : step.inputs) {
      json j{{"label", in.label}, {"value", StepValueToJson(in.value)}};
      if (in.key) j["key"] = *in.key;
      if (in.ref) j["ref"] = *in.ref;
      inputs.push_back(std::move(j));
    }
    steps.push_back(json{{"op", step.op},
                         {"path", step.path},
                         {"inputs", std::move(inputs)},
                         {"output", StepValueToJson(step.output)},
                         {"rendered", step.rendered}});
  }
  return json{{"steps", std::move(steps)},
              {"final", AnswerToJson(plan.final)},
              {"warnings", plan.warnings}};
}

DerivationPlan PlanFromJson(const json &j) try {
  if (!j.is_object() || !j.contains("steps") || !j["steps"].is_array() || !j.contains("final")) {
    throw Error(ErrorCode::kSchemaError, "plan needs steps and final");
  }
  DerivationPlan plan;
  for (const json &s : j["steps"]) {
    if (!s.is_object() || !s.contains("op") || !s.contains("inputs") || !s.contains("output")) {
      throw Error(ErrorCode::kSchemaError, "step needs op, inputs, output");
    }
    DerivationStep step;
    step.op = s["op"].get<std::string>();
    step.path = s.value("path", NodePath{});
    for (const json &in : s["inputs"]) {
      StepInput input;
      input.label = in.at("label").get<std::string>();
      input.value = StepValueFromJson(in.at("value"));
      if (in.contains("key")) input.key = in["key"].get<std::string>();
      if (in.contains("ref")) input.ref = in["ref"].get<std::size_t>();
      step.inputs.push_back(std::move(input));
    }
    step.output = StepValueFromJson(s["output"]);
    step.rendered = s.value("rendered", "");
    plan.steps.push_back(std::move(step));
  }
  plan.final = AnswerFromJson(j["final"]);
  if (j.contains("warnings")) plan.warnings = j["warnings"].get<std::vector<std::string>>();
  return plan;
} catch (const json::exception &e) {
  throw Error(ErrorCode::kSchemaError, std::string("plan: ") + e.what());
}

}  // namespace trmr
