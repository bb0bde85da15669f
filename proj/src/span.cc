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

#include "trmr/span.h"

#include "trmr/error.h"

namespace trmr {

const char *SpanSourceName(SpanSource source) {
  return source == SpanSource::kQuestion ? "question" : "passage";
}

bool Span::Matches(std::string_view source_text) const {
  if (start >= end || end > source_text.size()) return false;
  return source_text.substr(start, end - start) == text;
}

Span MakeSpan(SpanSource source, std::string_view source_text, std::size_t start,
              std::size_t end) {
  if (start >= end || end > source_text.size()) {
    throw Error(ErrorCode::kInvalidSpan,
                std::string(SpanSourceName(source)) + " span [" + std::to_string(start) +
                    ", " + std::to_string(end) + ") outside text of length " +
                    std::to_string(source_text.size()));
  }
  return Span{source, start, end, std::string(source_text.substr(start, end - start))};
}

}  // namespace trmr
