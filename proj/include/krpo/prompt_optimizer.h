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

#ifndef KRPO_PROMPT_OPTIMIZER_H_
#define KRPO_PROMPT_OPTIMIZER_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "krpo/extractor.h"
#include "krpo/llm_gateway.h"
#include "krpo/prompts.h"
#include "krpo/self_evaluator.h"
#include "krpo/triplet.h"

namespace krpo {

// One sample's pair of textual gradients: evaluation feedback (grad1) and
// prompt guidance derived from it (grad2).
struct GradientRecord {
  std::string sentence_id;
  std::string sentence_text;
  std::vector<Triplet> triplets;
  double metrics_total = 0.0;
  std::string grad1;
  std::string grad2;
};

struct FeedbackBuffer {
  int batch_index = 0;
  std::vector<GradientRecord> entries;
  int capacity = 5;
};

struct OptimizerOptions {
  int batch_size = 5;
  std::size_t context_budget = 12000;
  // Extension: roll back an update when the next batch's mean score drops.
  bool guarded_updates = false;
  int parallelism = 1;
};

enum class SampleStatus { kOk, kEmptyExtraction, kExtractFailed, kGradientFailed };

std::string_view SampleStatusName(SampleStatus status);

// One row of the optimization trace.
struct TraceRow {
  std::string sentence_id;
  int epoch = 0;
  int batch_index = 0;
  int prompt_version = 0;  // version used for this sample's extraction
  double metrics_total = 0.0;
  int num_triplets = 0;
  SampleStatus status = SampleStatus::kOk;
  std::vector<Triplet> triplets;
};

// "[s, r, o] (label: entailment, score: 1)" per line, or "(none)".
std::string RenderEvaluatedTriplets(const SentenceEvaluation &evaluation);
// Per-triplet scores followed by "Total: <sum>".
std::string RenderMetrics(const SentenceEvaluation &evaluation);
// Bracketed triplets joined by "; ", or "(none)".
std::string RenderTripletLine(const std::vector<Triplet> &triplets);

// Update context: one block per entry, ordered by sentence id,
//   ### Sample <id>
//   Sentence: ...
//   Triplets: ...
//   Guidance: <grad2>
// separated by blank lines. When the result would exceed budget bytes every
// Guidance is cut to a common maximum length so the total fits.
std::string BuildContext(const FeedbackBuffer &buffer, std::size_t budget);

// Extracts the new prompt from an update reply: the span between the first
// and last non-empty lines, the inside of <VARIABLE> tags when present, with
// stray tags removed.
std::string RecoverPromptText(std::string_view response);

std::string FormatScore(double value);

class PromptOptimizer {
 public:
  PromptOptimizer(LlmGateway &gateway, const PromptAssets &assets,
                  const SelfEvaluator &evaluator, OptimizerOptions options);

  // grad1. Throws Error(kGradientEmpty) on a blank reply.
  std::string GenEvalFeedback(const SentenceEvaluation &evaluation) const;

  // grad2. grad1 must be non-empty.
  std::string GenPromptGuidance(const PromptState &prompt,
                                const SentenceRecord &sentence,
                                const std::vector<Triplet> &triplets,
                                const std::string &grad1) const;

  // One prompt rewrite from a batch of feedback. A gateway failure or an
  // empty recovered prompt returns the input unchanged.
  PromptState UpdatePrompt(const PromptState &prompt,
                           const FeedbackBuffer &buffer) const;

  // One pass over dataset in order, ceil(N/B) batches, one update per batch
  // that produced feedback. Appends one TraceRow per sample to trace.
  PromptState RunEpoch(std::span<const SentenceRecord> dataset,
                       PromptState prompt, int epoch,
                       std::vector<TraceRow> *trace);

  const OptimizerOptions &options() const { return options_; }

 private:
  struct SampleOutcome {
    TraceRow row;
    bool has_gradient = false;
    GradientRecord gradient;
  };

  SampleOutcome ProcessSample(const SentenceRecord &sentence,
                              const PromptState &prompt) const;

  LlmGateway &gateway_;
  const PromptAssets &assets_;
  const SelfEvaluator &evaluator_;
  OptimizerOptions options_;
  int next_batch_index_ = 0;
  // Guarded-update bookkeeping.
  bool guard_pending_ = false;
  std::string guard_previous_text_;
  double guard_previous_mean_ = 0.0;
};

}  // namespace krpo

#endif  // KRPO_PROMPT_OPTIMIZER_H_
