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

#ifndef TRMR_SPAN_H_
#define TRMR_SPAN_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "trmr/answer.h"

namespace trmr {

enum class SpanSource { kQuestion, kPassage };

const char *SpanSourceName(SpanSource source);

// Character range [start, end) of a question or passage, with the covered
// text cached. Offsets are byte offsets into the UTF-8 source text.
struct Span {
  SpanSource source = SpanSource::kQuestion;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;

  bool operator==(const Span &) const = default;

  // True iff the offsets are in range and `text` equals the source substring.
  bool Matches(std::string_view source_text) const;
};

// Builds a span from offsets, copying the text. Throws InvalidSpan when the
// range is empty or out of bounds.
Span MakeSpan(SpanSource source, std::string_view source_text, std::size_t start,
              std::size_t end);

struct Passage {
  std::string id;
  std::string text;

  bool operator==(const Passage &) const = default;
};

struct Question {
  std::string id;
  std::string passage_id;
  std::string text;
  // Absent for DROP entries whose answer fields are all empty.
  std::optional<Answer> answer;

  bool operator==(const Question &) const = default;
};

}  // namespace trmr

#endif  // TRMR_SPAN_H_
