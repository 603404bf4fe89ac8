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

#ifndef KRPO_KNOWLEDGE_GRAPH_H_
#define KRPO_KNOWLEDGE_GRAPH_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "krpo/triplet.h"

namespace krpo {

// Normalized (subject, relation, object); see NormalizedKey.
using TripleKey = std::tuple<std::string, std::string, std::string>;

TripleKey KeyOf(const std::string &subject, const std::string &relation,
                const std::string &object);

struct GraphEntry {
  std::string subject;
  std::string relation;
  std::string object;
  std::string raw_relation;
  std::vector<std::string> sentences;

  friend bool operator==(const GraphEntry &, const GraphEntry &) = default;
};

// Deduplicated canonical triplets with per-triple provenance. Surface forms
// come from the first insertion of a key.
class KnowledgeGraph {
 public:
  // True for a new key; false appends provenance to the existing entry.
  bool Insert(const CanonicalTriplet &t);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<TripleKey, GraphEntry> &entries() const { return entries_; }

  // Triplets asserted by each sentence id, in key order.
  std::map<std::string, std::vector<Triplet>> TripletsBySentence() const;

  // JSONL, one {"subject","relation","object","raw_relation","sentences"}
  // per triple, sorted by key. Byte-stable for equal graphs.
  std::string ToJsonl() const;
  void Export(const std::filesystem::path &path) const;
  static KnowledgeGraph FromJsonl(const std::string &text);
  static KnowledgeGraph Import(const std::filesystem::path &path);

  friend bool operator==(const KnowledgeGraph &,
                         const KnowledgeGraph &) = default;

 private:
  std::map<TripleKey, GraphEntry> entries_;
};

}  // namespace krpo

#endif  // KRPO_KNOWLEDGE_GRAPH_H_
