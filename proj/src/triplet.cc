// Copyright 2026 The KRPO Authors.
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

#include "krpo/triplet.h"

#include "krpo/error.h"
#include "krpo/text.h"

namespace krpo {

bool Triplet::IsValid() const {
  return !Trim(subject).empty() && !Trim(relation).empty() &&
         !Trim(object).empty();
}

std::vector<std::string> SplitTopLevelFields(std::string_view inner) {
  std::vector<std::string> fields;
  std::string current;
  int depth = 0;
  bool in_quotes = false;
  for (char c : inner) {
    if (in_quotes) {
      if (c == '"') in_quotes = false;
      current.push_back(c);
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        break;
      case '(': case '[': case '{':
        ++depth;
        break;
      case ')': case ']': case '}':
        if (depth > 0) --depth;
        break;
      case ',':
        if (depth == 0) {
          fields.push_back(std::move(current));
          current.clear();
          continue;
        }
        break;
      default:
        break;
    }
    current.push_back(c);
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string CleanField(std::string_view field) {
  std::string trimmed = Trim(field);
  if (trimmed.size() >= 2) {
    char first = trimmed.front();
    char last = trimmed.back();
    if ((first == '"' && last == '"') || (first == '\'' && last == '\'')) {
      trimmed = Trim(std::string_view(trimmed).substr(1, trimmed.size() - 2));
    }
  }
  return trimmed;
}

Triplet ParseTripletLiteral(std::string_view text) {
  std::string trimmed = Trim(text);
  if (trimmed.size() < 2) {
    throw Error(ErrorCode::kMalformedTriplet, "not a tuple: '" + trimmed + "'");
  }
  char open = trimmed.front();
  char close = trimmed.back();
  if (!((open == '[' && close == ']') || (open == '(' && close == ')'))) {
    throw Error(ErrorCode::kMalformedTriplet,
                "missing brackets: '" + trimmed + "'");
  }
  std::vector<std::string> fields = SplitTopLevelFields(
      std::string_view(trimmed).substr(1, trimmed.size() - 2));
  if (fields.size() != 3) {
    throw Error(ErrorCode::kMalformedTriplet,
                "expected 3 fields, got " + std::to_string(fields.size()) +
                    ": '" + trimmed + "'");
  }
  Triplet t{Nfc(CleanField(fields[0])), Nfc(CleanField(fields[1])),
            Nfc(CleanField(fields[2]))};
  if (t.subject.empty() || t.relation.empty() || t.object.empty()) {
    throw Error(ErrorCode::kMalformedTriplet, "empty field: '" + trimmed + "'");
  }
  return t;
}

std::string RenderTriplet(const Triplet &t) {
  return "[" + t.subject + ", " + t.relation + ", " + t.object + "]";
}

}  // namespace krpo
