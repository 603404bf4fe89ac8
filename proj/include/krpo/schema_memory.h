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

#ifndef KRPO_SCHEMA_MEMORY_H_
#define KRPO_SCHEMA_MEMORY_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace krpo {

inline constexpr std::string_view kSubjectMask = "[SUBJECT]";
inline constexpr std::string_view kObjectMask = "[OBJECT]";

// True when schema contains each mask token exactly once.
bool HasMaskTokensOnce(std::string_view schema);

struct RelationSchema {
  std::string relation;
  std::string schema_text;  // masked restored sentence captured at creation
  std::string created_at_sentence;
  int use_count = 0;

  friend bool operator==(const RelationSchema &,
                         const RelationSchema &) = default;
};

// Canonical relations known so far. Append-only apart from use counts;
// relation names are unique case-insensitively.
class SchemaMemory {
 public:
  const std::vector<RelationSchema> &entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const RelationSchema &operator[](std::size_t i) const { return entries_[i]; }

  // Case-insensitive lookup by relation name.
  std::optional<std::size_t> Find(std::string_view relation) const;

  // Throws Error(kInvalidArgument) for a duplicate name or a schema text
  // without both mask tokens.
  void Append(RelationSchema schema);
  void IncrementUse(std::size_t index);

  // JSON array of {"relation","schema_text","created_at_sentence","use_count"}.
  nlohmann::json ToJson() const;
  static SchemaMemory FromJson(const nlohmann::json &doc);
  void Save(const std::filesystem::path &path) const;
  static SchemaMemory Load(const std::filesystem::path &path);

  // Seed ontology: one "relation<TAB>schema text" per line; blank lines and
  // lines starting with '#' are skipped.
  static SchemaMemory LoadSeedFile(const std::filesystem::path &path);

  friend bool operator==(const SchemaMemory &, const SchemaMemory &) = default;

 private:
  std::vector<RelationSchema> entries_;
};

}  // namespace krpo

#endif  // KRPO_SCHEMA_MEMORY_H_
