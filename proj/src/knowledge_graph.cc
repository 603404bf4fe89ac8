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

#include "krpo/knowledge_graph.h"

#include "json.hpp"
#include "krpo/error.h"
#include "krpo/file_util.h"
#include "krpo/text.h"

namespace krpo {

TripleKey KeyOf(const std::string &subject, const std::string &relation,
                const std::string &object) {
  return {NormalizedKey(subject), NormalizedKey(relation), NormalizedKey(object)};
}

bool KnowledgeGraph::Insert(const CanonicalTriplet &t) {
  CheckPrecondition(!Trim(t.subject).empty() && !Trim(t.relation).empty() &&
                        !Trim(t.object).empty(),
                    "canonical triplet fields non-empty");
  TripleKey key = KeyOf(t.subject, t.relation, t.object);
  auto [it, inserted] = entries_.try_emplace(
      std::move(key), GraphEntry{t.subject, t.relation, t.object,
                                 t.raw_relation, {}});
  it->second.sentences.push_back(t.sentence_id);
  return inserted;
}

std::map<std::string, std::vector<Triplet>> KnowledgeGraph::TripletsBySentence()
    const {
  std::map<std::string, std::vector<Triplet>> by_sentence;
  for (const auto &[key, entry] : entries_) {
    std::string last;
    for (const std::string &id : entry.sentences) {
      if (id == last) continue;
      auto &list = by_sentence[id];
      Triplet t{entry.subject, entry.relation, entry.object};
      if (list.empty() || !(list.back() == t)) list.push_back(std::move(t));
      last = id;
    }
  }
  return by_sentence;
}

std::string KnowledgeGraph::ToJsonl() const {
  std::string out;
  for (const auto &[key, entry] : entries_) {
    nlohmann::ordered_json line;
    line["subject"] = entry.subject;
    line["relation"] = entry.relation;
    line["object"] = entry.object;
    line["raw_relation"] = entry.raw_relation;
    line["sentences"] = entry.sentences;
    out += line.dump() + "\n";
  }
  return out;
}

void KnowledgeGraph::Export(const std::filesystem::path &path) const {
  WriteFileAtomically(path, ToJsonl());
}

KnowledgeGraph KnowledgeGraph::FromJsonl(const std::string &text) {
  KnowledgeGraph kg;
  int line_number = 0;
  for (const std::string &line : SplitLines(text)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    try {
      if (doc.is_discarded()) throw Error(ErrorCode::kParseError, "invalid JSON");
      CanonicalTriplet t{doc.at("subject").get<std::string>(),
                         doc.at("relation").get<std::string>(),
                         doc.at("object").get<std::string>(),
                         doc.value("raw_relation", doc.at("relation").get<std::string>()),
                         ""};
      const auto sentences = doc.at("sentences").get<std::vector<std::string>>();
      if (sentences.empty()) {
        throw Error(ErrorCode::kParseError, "triple without provenance");
      }
      for (const std::string &id : sentences) {
        t.sentence_id = id;
        kg.Insert(t);
      }
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kParseError,
                  "kg line " + std::to_string(line_number) + ": " + e.what());
    } catch (const Error &e) {
      throw Error(ErrorCode::kParseError,
                  "kg line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return kg;
}

KnowledgeGraph KnowledgeGraph::Import(const std::filesystem::path &path) {
  return FromJsonl(ReadFile(path));
}

}  // namespace krpo
