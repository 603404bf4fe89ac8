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

#ifndef KRPO_CANONICALIZER_H_
#define KRPO_CANONICALIZER_H_

#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "krpo/llm_gateway.h"
#include "krpo/prompts.h"
#include "krpo/schema_memory.h"
#include "krpo/scorer.h"
#include "krpo/triplet.h"

namespace krpo {

struct ScoredCandidate {
  std::string relation;
  std::string schema_text;
  double score = 0.0;

  friend bool operator==(const ScoredCandidate &,
                         const ScoredCandidate &) = default;
};

// Replaces the first case-insensitive occurrence of subject with [SUBJECT],
// then the first occurrence of object outside the subject mask with
// [OBJECT]. An entity that cannot be found gets its token appended after a
// dash separator, so both tokens are always present exactly once.
//
//   ("The Pontiac Rageous was assembled in Detroit.", "Pontiac Rageous",
//    "Detroit") -> "The [SUBJECT] was assembled in [OBJECT]."
std::string MaskEntities(std::string_view restored, std::string_view subject,
                         std::string_view object);

// One score per memory entry, in memory order.
std::vector<ScoredCandidate> ScoreCandidates(std::string_view query_schema,
                                             const SchemaMemory &memory,
                                             SchemaScorer &scorer);

// The k best by descending score, ties by ascending relation name.
std::vector<ScoredCandidate> TopK(std::vector<ScoredCandidate> scored, int k);

// Chooses a canonical relation among candidates for a raw triplet, or
// nullopt for "none of the above".
class RelationDecider {
 public:
  virtual ~RelationDecider() = default;
  virtual std::optional<std::string> Decide(
      const SentenceRecord &sentence, const Triplet &triplet,
      const std::string &query_schema,
      const std::vector<ScoredCandidate> &candidates) = 0;
};

// Numbered "relation, dash, schema" lines plus a final "None of the above".
std::string RenderChoices(const std::vector<ScoredCandidate> &candidates);

// Reads a decision reply: a leading choice number, else "none of the
// above", else the earliest verbatim candidate name. Anything else is
// nullopt.
std::optional<std::string> ParseDecision(
    std::string_view response, const std::vector<ScoredCandidate> &candidates);

// Asks the model with the canonicalization-decision template. No call is
// made for an empty candidate list; gateway failures decide nullopt.
class LlmRelationDecider : public RelationDecider {
 public:
  LlmRelationDecider(LlmGateway &gateway, const PromptAssets &assets);

  std::optional<std::string> Decide(
      const SentenceRecord &sentence, const Triplet &triplet,
      const std::string &query_schema,
      const std::vector<ScoredCandidate> &candidates) override;

 private:
  LlmGateway &gateway_;
  const PromptAssets &assets_;
};

// Memory-backed canonicalization: mask, score, Top-K, decide, then either
// map onto the chosen relation or add the raw relation as a new schema.
// Calls are serialized against memory mutation.
class Canonicalizer {
 public:
  Canonicalizer(SchemaMemory &memory, SchemaScorer &scorer,
                RelationDecider &decider, int top_k);

  CanonicalTriplet Canonicalize(const SentenceRecord &sentence,
                                const Triplet &triplet,
                                const std::string &restored);

  const SchemaMemory &memory() const { return memory_; }

 private:
  SchemaMemory &memory_;
  SchemaScorer &scorer_;
  RelationDecider &decider_;
  int top_k_;
  std::mutex mu_;
};

}  // namespace krpo

#endif  // KRPO_CANONICALIZER_H_
