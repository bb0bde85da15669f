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

#include "trmr/tree.h"

#include <cctype>
#include <cstdint>

#include "trmr/error.h"

namespace trmr {

using nlohmann::json;

TrmrArg::TrmrArg(TrmrTree node)
    : value_(std::make_shared<const TrmrTree>(std::move(node))) {}

bool TrmrArg::operator==(const TrmrArg &other) const {
  if (is_span() != other.is_span()) return false;
  if (is_span()) return span() == other.span();
  return node() == other.node();
}

std::string FormatPath(const NodePath &path) {
  if (path.empty()) return "/";
  std::string out;
  for (std::size_t index : path) out += "/" + std::to_string(index);
  return out;
}

const TrmrTree *FindNode(const TrmrTree &tree, const NodePath &path) {
  const TrmrTree *node = &tree;
  for (std::size_t index : path) {
    if (index >= node->args.size() || node->args[index].is_span()) return nullptr;
    node = &node->args[index].node();
  }
  return node;
}

namespace {

using NodeFn = std::function<void(const NodePath &, const TrmrTree &)>;

void Walk(const TrmrTree &node, NodePath &path, const NodeFn &fn, bool post_order) {
  if (!post_order) fn(path, node);
  for (std::size_t i = 0; i < node.args.size(); ++i) {
    if (node.args[i].is_span()) continue;
    path.push_back(i);
    Walk(node.args[i].node(), path, fn, post_order);
    path.pop_back();
  }
  if (post_order) fn(path, node);
}

}  // namespace

void VisitNodes(const TrmrTree &tree, const NodeFn &fn) {
  NodePath path;
  Walk(tree, path, fn, false);
}

void VisitNodesPostOrder(const TrmrTree &tree, const NodeFn &fn) {
  NodePath path;
  Walk(tree, path, fn, true);
}

bool SameStructure(const TrmrTree &a, const TrmrTree &b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    const TrmrArg &x = a.args[i];
    const TrmrArg &y = b.args[i];
    if (x.is_span() != y.is_span()) return false;
    if (x.is_span() ? x.span().text != y.span().text : !SameStructure(x.node(), y.node())) {
      return false;
    }
  }
  return true;
}

namespace {

void CheckNode(const TrmrTree &node) {
  const OperatorSig *sig = FindOperator(node.op);
  if (sig == nullptr) throw Error(ErrorCode::kUnknownOperator, "'" + node.op + "'");
  if (!sig->ArityOk(node.args.size())) {
    throw Error(ErrorCode::kArityError,
                node.op + " takes " + (sig->variadic ? "at least " : "") +
                    std::to_string(sig->min_arity) + " argument(s), got " +
                    std::to_string(node.args.size()));
  }
  for (std::size_t i = 0; i < node.args.size(); ++i) {
    const TrmrArg &arg = node.args[i];
    if (arg.is_span()) {
      if (arg.span().source != SpanSource::kQuestion) {
        throw Error(ErrorCode::kInvalidSpan, node.op + " argument " + std::to_string(i + 1) +
                                                 " is not a question span");
      }
      continue;
    }
    if (sig->slot_kind(i) != SlotKind::kOrdinary) {
      throw Error(ErrorCode::kKindMismatch,
                  node.op + " needs a question span as its " +
                      (sig->slot_kind(i) == SlotKind::kSuperlative ? "superlative"
                                                                   : "condition"));
    }
    CheckNode(arg.node());
  }
}

bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

bool IsWordChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, std::string_view question)
      : text_(text), question_(question) {}

  ParseResult Run() {
    if (text_.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      Fail("empty expression");
    }
    ParseResult result;
    SkipSpace();
    result.tree = ParseOperation();
    SkipSpace();
    if (pos_ != text_.size()) Fail("unexpected text after expression");
    CheckNode(result.tree);
    result.warnings = std::move(warnings_);
    return result;
  }

 private:
  [[noreturn]] void Fail(const std::string &what) const {
    throw Error(ErrorCode::kSyntaxError, what + " at offset " + std::to_string(pos_));
  }

  bool AtEnd() const { return pos_ >= text_.size(); }
  char Peek() const { return text_[pos_]; }

  void SkipSpace() {
    while (!AtEnd() && IsSpace(Peek())) ++pos_;
  }

  // NAME followed (after optional space) by '(' starting at pos_.
  bool AtOperation() const {
    std::size_t p = pos_;
    while (p < text_.size() && IsNameChar(text_[p])) ++p;
    if (p == pos_) return false;
    while (p < text_.size() && IsSpace(text_[p])) ++p;
    return p < text_.size() && text_[p] == '(';
  }

  TrmrTree ParseOperation() {
    std::size_t begin = pos_;
    while (!AtEnd() && IsNameChar(Peek())) ++pos_;
    if (pos_ == begin) Fail("expected operator name");
    TrmrTree node;
    node.op = std::string(text_.substr(begin, pos_ - begin));
    if (FindOperator(node.op) == nullptr) {
      throw Error(ErrorCode::kUnknownOperator, "'" + node.op + "'");
    }
    SkipSpace();
    if (AtEnd() || Peek() != '(') Fail("expected '(' after " + node.op);
    ++pos_;
    for (;;) {
      node.args.push_back(ParseArgument());
      SkipSpace();
      if (AtEnd()) Fail("unbalanced parentheses");
      if (Peek() == ',') {
        ++pos_;
        continue;
      }
      if (Peek() == ')') {
        ++pos_;
        break;
      }
      Fail(std::string("unexpected '") + Peek() + "'");
    }
    return node;
  }

  TrmrArg ParseArgument() {
    SkipSpace();
    if (AtEnd()) Fail("unbalanced parentheses");
    if (Peek() == '"') return Anchor(ParseQuoted());
    if (AtOperation()) return ParseOperation();

    std::size_t begin = pos_;
    while (!AtEnd() && Peek() != ',' && Peek() != ')') {
      if (Peek() == '(' || Peek() == '"') Fail(std::string("unquoted '") + Peek() + "'");
      ++pos_;
    }
    std::string_view raw = text_.substr(begin, pos_ - begin);
    while (!raw.empty() && IsSpace(raw.back())) raw.remove_suffix(1);
    if (raw.empty()) Fail("empty argument");
    return Anchor(std::string(raw));
  }

  std::string ParseQuoted() {
    ++pos_;  // opening quote
    std::string out;
    for (;;) {
      if (AtEnd()) Fail("unterminated quoted argument");
      char c = Peek();
      ++pos_;
      if (c != '"') {
        out.push_back(c);
      } else if (!AtEnd() && Peek() == '"') {
        out.push_back('"');
        ++pos_;
      } else {
        break;
      }
    }
    if (out.empty()) Fail("empty argument");
    return out;
  }

  Span Anchor(const std::string &leaf) {
    std::vector<std::size_t> hits;
    for (std::size_t at = question_.find(leaf); at != std::string_view::npos;
         at = question_.find(leaf, at + 1)) {
      hits.push_back(at);
    }
    if (hits.empty()) throw Error(ErrorCode::kSpanNotInQuestion, "'" + leaf + "'");
    std::size_t chosen = hits.front();
    if (hits.size() > 1) {
      for (std::size_t at : hits) {
        std::size_t end = at + leaf.size();
        bool left = at == 0 || !IsWordChar(question_[at - 1]) || !IsWordChar(leaf.front());
        bool right = end == question_.size() || !IsWordChar(question_[end]) ||
                     !IsWordChar(leaf.back());
        if (left && right) {
          chosen = at;
          break;
        }
      }
      warnings_.push_back("'" + leaf + "' occurs " + std::to_string(hits.size()) +
                          " times in the question; using offset " + std::to_string(chosen));
    }
    return MakeSpan(SpanSource::kQuestion, question_, chosen, chosen + leaf.size());
  }

  std::string_view text_;
  std::string_view question_;
  std::size_t pos_ = 0;
  std::vector<std::string> warnings_;
};

}  // namespace

void CheckStructure(const TrmrTree &tree) { CheckNode(tree); }

ParseResult ParseTrmrWithWarnings(std::string_view text, std::string_view question_text) {
  return ExpressionParser(text, question_text).Run();
}

std::string QuoteLeafText(std::string_view text) {
  bool quote = text.empty() || IsSpace(text.front()) || IsSpace(text.back()) ||
               text.find_first_of(",()\"") != std::string_view::npos;
  if (!quote) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string SerializeTrmr(const TrmrTree &tree) {
  std::string out = tree.op + "(";
  for (std::size_t i = 0; i < tree.args.size(); ++i) {
    if (i) out += ", ";
    const TrmrArg &arg = tree.args[i];
    out += arg.is_span() ? QuoteLeafText(arg.span().text) : SerializeTrmr(arg.node());
  }
  return out + ")";
}

namespace {

ResultKind KindOf(const TrmrTree &node) {
  const OperatorSig *sig = FindOperator(node.op);
  if (sig == nullptr) throw Error(ErrorCode::kUnknownOperator, "'" + node.op + "'");
  for (const TrmrArg &arg : node.args) {
    if (arg.is_span()) continue;
    ResultKind child = KindOf(arg.node());
    if (!sig->accepts_nested) {
      throw Error(ErrorCode::kKindMismatch, node.op + " takes only span arguments, got " +
                                                arg.node().op + " (" + ResultKindName(child) +
                                                ")");
    }
    ResultKind wanted = node.op == "count" ? ResultKind::kSpanList : ResultKind::kNumber;
    if (child != wanted) {
      throw Error(ErrorCode::kKindMismatch, node.op + " needs a " + ResultKindName(wanted) +
                                                " argument, got " + arg.node().op + " (" +
                                                ResultKindName(child) + ")");
    }
  }
  return sig->result_kind;
}

}  // namespace

ResultKind Typecheck(const TrmrTree &tree) {
  CheckStructure(tree);
  return KindOf(tree);
}

json SpanToJson(const Span &span) {
  return json{{"start", span.start}, {"end", span.end}, {"text", span.text}};
}

namespace {

[[noreturn]] void SchemaFail(const std::string &what) {
  throw Error(ErrorCode::kSchemaError, what);
}

bool IsIndex(const json &j) { return j.is_number_integer() && j.get<std::int64_t>() >= 0; }

}  // namespace

Span SpanFromJson(const json &j, SpanSource source) {
  if (!j.is_object() || !j.contains("start") || !j.contains("end") || !j.contains("text") ||
      !IsIndex(j["start"]) || !IsIndex(j["end"]) ||
      !j["text"].is_string()) {
    SchemaFail("span needs non-negative start/end and string text: " + j.dump());
  }
  return Span{source, j["start"].get<std::size_t>(), j["end"].get<std::size_t>(),
              j["text"].get<std::string>()};
}

json TreeToJson(const TrmrTree &tree) {
  json args = json::array();
  for (const TrmrArg &arg : tree.args) {
    if (arg.is_span()) {
      json s = SpanToJson(arg.span());
      s["kind"] = "span";
      args.push_back(std::move(s));
    } else {
      args.push_back(json{{"kind", "op"}, {"node", TreeToJson(arg.node())}});
    }
  }
  return json{{"op", tree.op}, {"args", std::move(args)}};
}

TrmrTree TreeFromJson(const json &j) {
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string() || !j.contains("args") ||
      !j["args"].is_array()) {
    SchemaFail("tree node needs string 'op' and array 'args'");
  }
  TrmrTree tree;
  tree.op = j["op"].get<std::string>();
  for (const json &arg : j["args"]) {
    std::string kind = arg.is_object() ? arg.value("kind", "") : "";
    if (kind == "span") {
      tree.args.emplace_back(SpanFromJson(arg, SpanSource::kQuestion));
    } else if (kind == "op" && arg.contains("node")) {
      tree.args.emplace_back(TreeFromJson(arg["node"]));
    } else {
      SchemaFail("argument of " + tree.op + " must be {kind: span|op}");
    }
  }
  return tree;
}

}  // namespace trmr
