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

#ifndef TRMR_TREE_H_
#define TRMR_TREE_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "trmr/operators.h"
#include "trmr/span.h"

namespace trmr {

struct TrmrTree;

// An operator argument: a question span or a nested operation. Nested
// nodes are shared and immutable, so copying a tree is cheap.
class TrmrArg {
 public:
  TrmrArg(Span span) : value_(std::move(span)) {}  // NOLINT(google-explicit-constructor)
  TrmrArg(TrmrTree node);                           // NOLINT(google-explicit-constructor)

  bool is_span() const { return std::holds_alternative<Span>(value_); }
  const Span &span() const { return std::get<Span>(value_); }
  const TrmrTree &node() const { return *std::get<std::shared_ptr<const TrmrTree>>(value_); }

  // Deep comparison.
  bool operator==(const TrmrArg &other) const;

 private:
  std::variant<Span, std::shared_ptr<const TrmrTree>> value_;
};

// Problem-parsing expression: op(arg, ...).
struct TrmrTree {
  std::string op;
  std::vector<TrmrArg> args;

  bool operator==(const TrmrTree &) const = default;
};

// Child indices from the root; empty for the root itself.
using NodePath = std::vector<std::size_t>;

// "/" for the root, "/0/1" otherwise.
std::string FormatPath(const NodePath &path);

// nullptr if the path does not name a node of `tree`.
const TrmrTree *FindNode(const TrmrTree &tree, const NodePath &path);

// Pre-order walk (parent before children).
void VisitNodes(const TrmrTree &tree,
                const std::function<void(const NodePath &, const TrmrTree &)> &fn);

// Post-order walk (children before parent, left to right).
void VisitNodesPostOrder(const TrmrTree &tree,
                         const std::function<void(const NodePath &, const TrmrTree &)> &fn);

// Equal operator names, argument order and leaf texts; offsets ignored.
bool SameStructure(const TrmrTree &a, const TrmrTree &b);

// Checks registry membership, arity, span-only superlative/condition slots
// and question-sourced leaves. Throws the matching error.
void CheckStructure(const TrmrTree &tree);

struct ParseResult {
  TrmrTree tree;
  // One entry per leaf whose text occurs more than once in the question.
  std::vector<std::string> warnings;
};

// Parses the textual form and anchors every leaf in `question_text`.
// Multiple occurrences: the first one that starts and ends on a word
// boundary wins, else the first occurrence; a warning is recorded.
ParseResult ParseTrmrWithWarnings(std::string_view text, std::string_view question_text);

inline TrmrTree ParseTrmr(std::string_view text, const Question &question) {
  return ParseTrmrWithWarnings(text, question.text).tree;
}

// Canonical text form: "op(arg, arg)". Leaf texts that contain , ( ) " or
// leading/trailing whitespace are double-quoted with quotes doubled.
std::string SerializeTrmr(const TrmrTree &tree);

// Quotes a leaf text if the grammar requires it.
std::string QuoteLeafText(std::string_view text);

// Result kind of the root; throws KindMismatch on an unusable nesting.
ResultKind Typecheck(const TrmrTree &tree);

// Structured form: {"op": ..., "args": [{"kind":"span",...} | {"kind":"op","node":...}]}.
nlohmann::json TreeToJson(const TrmrTree &tree);
// Throws SchemaError on malformed input; spans are not checked against any
// text here.
TrmrTree TreeFromJson(const nlohmann::json &json);

nlohmann::json SpanToJson(const Span &span);
Span SpanFromJson(const nlohmann::json &json, SpanSource source);

}  // namespace trmr

#endif  // TRMR_TREE_H_
