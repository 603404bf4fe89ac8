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

#include "krpo/dataset.h"

#include <set>
#include <string>

#include "json.hpp"
#include "krpo/error.h"
#include "krpo/file_util.h"
#include "krpo/text.h"

namespace krpo {
namespace {

[[noreturn]] void FailLine(std::size_t line, const std::string &what) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + what);
}

std::string RequireString(const nlohmann::json &doc, const char *key,
                          std::size_t line) {
  auto it = doc.find(key);
  if (it == doc.end()) FailLine(line, std::string("missing \"") + key + "\"");
  if (!it->is_string()) FailLine(line, std::string("\"") + key + "\" is not a string");
  return it->get<std::string>();
}

Triplet ParseGoldTriplet(const nlohmann::json &item, std::size_t line) {
  if (!item.is_array() || item.size() != 3) {
    FailLine(line, "gold triplet must be an array of 3 strings");
  }
  std::string fields[3];
  for (int i = 0; i < 3; ++i) {
    if (!item[i].is_string()) FailLine(line, "gold triplet field is not a string");
    fields[i] = Nfc(Trim(item[i].get<std::string>()));
  }
  Triplet t{fields[0], fields[1], fields[2]};
  if (!t.IsValid()) FailLine(line, "gold triplet has an empty field");
  return t;
}

}  // namespace

std::vector<SentenceRecord> ParseDataset(std::string_view jsonl) {
  std::vector<SentenceRecord> records;
  std::set<std::string> seen;
  std::size_t line_number = 0;
  for (const std::string &line : SplitLines(jsonl)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception &e) {
      FailLine(line_number, e.what());
    }
    if (!doc.is_object()) FailLine(line_number, "record is not an object");

    SentenceRecord record;
    record.id = RequireString(doc, "id", line_number);
    record.text = Nfc(RequireString(doc, "text", line_number));
    if (record.id.empty()) FailLine(line_number, "empty id");
    if (auto gold = doc.find("gold"); gold != doc.end() && !gold->is_null()) {
      if (!gold->is_array()) FailLine(line_number, "\"gold\" is not an array");
      std::vector<Triplet> triplets;
      for (const auto &item : *gold) {
        triplets.push_back(ParseGoldTriplet(item, line_number));
      }
      record.gold = std::move(triplets);
    }
    if (!seen.insert(record.id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "line " + std::to_string(line_number) + ": id \"" +
                      record.id + "\" already used");
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<SentenceRecord> LoadDataset(const std::filesystem::path &path) {
  return ParseDataset(ReadFile(path));
}

bool AllHaveGold(const std::vector<SentenceRecord> &records) {
  for (const SentenceRecord &r : records) {
    if (!r.gold.has_value()) return false;
  }
  return true;
}

}  // namespace krpo
