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

#include "krpo/schema_memory.h"

#include "krpo/error.h"
#include "krpo/file_util.h"
#include "krpo/text.h"

namespace krpo {
namespace {

int CountOccurrences(std::string_view haystack, std::string_view needle) {
  int count = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

}  // namespace

bool HasMaskTokensOnce(std::string_view schema) {
  return CountOccurrences(schema, kSubjectMask) == 1 &&
         CountOccurrences(schema, kObjectMask) == 1;
}

std::optional<std::size_t> SchemaMemory::Find(std::string_view relation) const {
  const std::string wanted = ToLower(relation);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (ToLower(entries_[i].relation) == wanted) return i;
  }
  return std::nullopt;
}

void SchemaMemory::Append(RelationSchema schema) {
  if (Trim(schema.relation).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty relation name");
  }
  if (Find(schema.relation)) {
    throw Error(ErrorCode::kInvalidArgument,
                "relation already in memory: " + schema.relation);
  }
  if (!HasMaskTokensOnce(schema.schema_text)) {
    throw Error(ErrorCode::kInvalidArgument,
                "schema for '" + schema.relation +
                    "' must contain [SUBJECT] and [OBJECT] once each: " +
                    schema.schema_text);
  }
  entries_.push_back(std::move(schema));
}

void SchemaMemory::IncrementUse(std::size_t index) {
  CheckPrecondition(index < entries_.size(), "memory index in range");
  ++entries_[index].use_count;
}

nlohmann::json SchemaMemory::ToJson() const {
  nlohmann::json doc = nlohmann::json::array();
  for (const RelationSchema &entry : entries_) {
    nlohmann::json item;
    item["relation"] = entry.relation;
    item["schema_text"] = entry.schema_text;
    item["created_at_sentence"] = entry.created_at_sentence;
    item["use_count"] = entry.use_count;
    doc.push_back(std::move(item));
  }
  return doc;
}

SchemaMemory SchemaMemory::FromJson(const nlohmann::json &doc) {
  if (!doc.is_array()) {
    throw Error(ErrorCode::kParseError, "schema memory must be a JSON array");
  }
  SchemaMemory memory;
  try {
    for (const nlohmann::json &item : doc) {
      memory.Append({item.at("relation").get<std::string>(),
                     item.at("schema_text").get<std::string>(),
                     item.value("created_at_sentence", std::string()),
                     item.value("use_count", 0)});
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kParseError,
                std::string("bad schema memory entry: ") + e.what());
  }
  return memory;
}

void SchemaMemory::Save(const std::filesystem::path &path) const {
  WriteFileAtomically(path, ToJson().dump(2) + "\n");
}

SchemaMemory SchemaMemory::Load(const std::filesystem::path &path) {
  nlohmann::json doc =
      nlohmann::json::parse(ReadFile(path), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kParseError, "invalid JSON in " + path.string());
  }
  return FromJson(doc);
}

SchemaMemory SchemaMemory::LoadSeedFile(const std::filesystem::path &path) {
  SchemaMemory memory;
  int line_number = 0;
  for (const std::string &line : SplitLines(ReadFile(path))) {
    ++line_number;
    std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::size_t tab = trimmed.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(line_number) +
                      ": expected 'relation<TAB>schema text'");
    }
    try {
      memory.Append({Trim(trimmed.substr(0, tab)),
                     Nfc(Trim(trimmed.substr(tab + 1))), "seed", 0});
    } catch (const Error &e) {
      throw Error(ErrorCode::kParseError, path.string() + ":" +
                                              std::to_string(line_number) +
                                              ": " + e.what());
    }
  }
  return memory;
}

}  // namespace krpo
