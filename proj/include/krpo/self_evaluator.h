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

#ifndef KRPO_SELF_EVALUATOR_H_
#define KRPO_SELF_EVALUATOR_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "krpo/extractor.h"
#include "krpo/llm_gateway.h"
#include "krpo/prompts.h"
#include "krpo/triplet.h"

namespace krpo {

enum class NliLabel { kEntailment, kNeutral, kContradiction };

std::string_view NliLabelName(NliLabel label);  // "entailment", ...
// Case-insensitive; nullopt for anything outside the three labels.
std::optional<NliLabel> ParseNliLabel(std::string_view text);

// Consistency score per label. The defaults are the ones the method uses;
// other values are only for experimentation.
struct ConsistencyScores {
  double entailment = 1.0;
  double neutral = 0.0;
  double contradiction = -0.5;
};

double ScoreLabel(NliLabel label, const ConsistencyScores &scores = {});

struct NliJudgement {
  NliLabel label = NliLabel::kNeutral;
  double confidence = 0.0;  // clamped to [0, 1]
  std::string reasoning;
};

struct TripletEvaluation {
  Triplet triplet;
  std::string restored_text;  // single line
  NliLabel label = NliLabel::kNeutral;
  double confidence = 0.0;
  std::string reasoning;
  double score = 0.0;
};

struct SentenceEvaluation {
  std::string sentence_id;
  std::vector<TripletEvaluation> evaluations;
  double total = 0.0;
};

// Recovers the verdict from a judge reply: the first balanced {...} block
// is parsed as JSON and must carry a legal "label". Throws
// Error(kNliParseError).
NliJudgement ParseNliResponse(std::string_view response);

class SelfEvaluator {
 public:
  SelfEvaluator(LlmGateway &gateway, const PromptAssets &assets,
                ConsistencyScores scores = {}, int parallelism = 1);

  // Knowledge restoration: the first non-empty line of the reply.
  // Throws Error(kEmptyRestoration) when there is none.
  std::string RestoreTriplet(const Triplet &t) const;

  NliJudgement JudgeNli(const std::string &premise,
                        const std::string &hypothesis) const;

  // One evaluation per triplet with premise = sentence text and
  // hypothesis = restored text. A failed restore or judge step degrades that
  // triplet to Neutral with score 0; this never throws for model failures.
  SentenceEvaluation EvaluateSentence(const SentenceRecord &sentence,
                                      const ExtractionResult &extraction) const;

  const ConsistencyScores &scores() const { return scores_; }

 private:
  LlmGateway &gateway_;
  const PromptAssets &assets_;
  ConsistencyScores scores_;
  int parallelism_;
};

}  // namespace krpo

#endif  // KRPO_SELF_EVALUATOR_H_
