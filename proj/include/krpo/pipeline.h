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

#ifndef KRPO_PIPELINE_H_
#define KRPO_PIPELINE_H_

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "krpo/config.h"
#include "krpo/knowledge_graph.h"
#include "krpo/llm_gateway.h"
#include "krpo/metrics.h"
#include "krpo/prompt_optimizer.h"
#include "krpo/prompts.h"
#include "krpo/schema_memory.h"
#include "krpo/scorer.h"
#include "krpo/self_evaluator.h"

namespace krpo {

// Output file names under the output directory.
inline constexpr const char *kPromptFinalFile = "prompt_final.txt";
inline constexpr const char *kTraceFile = "trace.jsonl";
inline constexpr const char *kScoresWindowFile = "scores_window.csv";
inline constexpr const char *kKgFile = "kg.jsonl";
inline constexpr const char *kMemoryFile = "memory.json";
inline constexpr const char *kMetricsJsonFile = "metrics.json";
inline constexpr const char *kMetricsCsvFile = "metrics.csv";
inline constexpr const char *kOptimizeMetricsJsonFile = "metrics_optimize.json";
inline constexpr const char *kOptimizeMetricsCsvFile = "metrics_optimize.csv";

inline constexpr std::size_t kScoreWindow = 25;

struct Phase1Result {
  PromptState prompt;
  std::vector<TraceRow> trace;
};

std::string TraceToJsonl(const std::vector<TraceRow> &trace);

// Consecutive non-overlapping windows of `window` trace rows (the last may be
// shorter). Columns: window, first_row, last_row, samples, mean_consistency,
// then partial/strict/exact F1 when every sample in the window has gold.
std::string WindowScoresCsv(const std::vector<TraceRow> &trace,
                            std::span<const SentenceRecord> dataset,
                            std::size_t window = kScoreWindow);

// Micro-averaged metrics of predictions keyed by sentence id against each
// record's gold. Throws Error(kMissingGold) when a record has none.
MetricsReport EvaluatePredictions(
    std::span<const SentenceRecord> dataset,
    const std::map<std::string, std::vector<Triplet>> &predictions);

std::unique_ptr<SchemaScorer> MakeScorer(const PipelineConfig &config);

class Pipeline {
 public:
  // transport may be null, in which case only replayed responses are
  // available. scorer defaults to MakeScorer(config).
  Pipeline(PipelineConfig config, std::shared_ptr<ChatTransport> transport,
           std::unique_ptr<SchemaScorer> scorer = nullptr,
           RetryPolicy retry = RetryPolicy());

  PromptState InitialPrompt() const;

  // Writes prompt_final.txt, trace.jsonl and scores_window.csv (and the
  // optimize-time metrics when enabled and gold is present).
  Phase1Result RunPhase1(std::span<const SentenceRecord> dataset);

  // Writes kg.jsonl and memory.json.
  KnowledgeGraph RunPhase2(std::span<const SentenceRecord> dataset,
                           const PromptState &prompt);

  // Writes metrics.json and metrics.csv. Throws Error(kMissingGold).
  MetricsReport RunEval(std::span<const SentenceRecord> dataset,
                        const KnowledgeGraph &kg);

  LlmGateway &gateway() { return *gateway_; }
  const PromptAssets &assets() const { return assets_; }
  const SchemaMemory &memory() const { return memory_; }
  const PipelineConfig &config() const { return config_; }

 private:
  PipelineConfig config_;
  PromptAssets assets_;
  std::shared_ptr<LlmGateway> gateway_;
  std::unique_ptr<SchemaScorer> scorer_;
  SelfEvaluator evaluator_;
  SchemaMemory memory_;
};

}  // namespace krpo

#endif  // KRPO_PIPELINE_H_
