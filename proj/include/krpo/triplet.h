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

#ifndef KRPO_TRIPLET_H_
#define KRPO_TRIPLET_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace krpo {

struct Triplet {
  std::string subject;
  std::string relation;
  std::string object;

  // All three fields non-empty after trimming.
  bool IsValid() const;

  friend bool operator==(const Triplet &, const Triplet &) = default;
  friend auto operator<=>(const Triplet &, const Triplet &) = default;
};

// A schema-aligned fact. relation is the canonical name; raw_relation is
// what the extractor emitted.
struct CanonicalTriplet {
  std::string subject;
  std::string relation;
  std::string object;
  std::string raw_relation;
  std::string sentence_id;

  friend bool operator==(const CanonicalTriplet &,
                         const CanonicalTriplet &) = default;
};

struct SentenceRecord {
  std::string id;
  std::string text;
  std::optional<std::vector<Triplet>> gold;
};

// Parses one bracketed or parenthesized 3-tuple such as
// "[Pontiac Rageous, buildDate, 1997]" or "(x , y , z)". Fields are
// trimmed, unquoted and NFC-normalized. Throws Error(kMalformedTriplet).
Triplet ParseTripletLiteral(std::string_view text);

// "[subject, relation, object]".
std::string RenderTriplet(const Triplet &t);

// Splits the inside of a bracket group at top-level commas. Commas nested
// in (), [] or {} or inside double quotes do not split.
std::vector<std::string> SplitTopLevelFields(std::string_view inner);

// Trims and removes one layer of matching surrounding quotes.
std::string CleanField(std::string_view field);

}  // namespace krpo

#endif  // KRPO_TRIPLET_H_
