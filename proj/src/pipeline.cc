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

#include "krpo/pipeline.h"

#include <cstdio>
#include <filesystem>

#include <glog/logging.h>

#include "json.hpp"
#include "krpo/canonicalizer.h"
#include "krpo/dataset.h"
#include "krpo/error.h"
#include "krpo/extractor.h"
#include "krpo/file_util.h"
#include "krpo/parallel.h"
#include "krpo/text.h"

namespace krpo {
namespace {

PromptAssets LoadAssets(const PipelineConfig &config) {
  PromptAssets assets = config.prompts_dir
                            ? PromptAssets::LoadFromDirectory(*config.prompts_dir)
                            : PromptAssets::Embedded();
  if (config.initial_prompt) {
    assets.initial_orte_prompt = Trim(ReadFile(*config.initial_prompt));
  }
  assets.Validate();
  return assets;
}

std::string FormatFixed(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

nlohmann::ordered_json TripletsJson(const std::vector<Triplet> &triplets) {
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const Triplet &t : triplets) {
    array.push_back({t.subject, t.relation, t.object});
  }
  return array;
}

// Last epoch's triplets per sentence.
std::map<std::string, std::vector<Triplet>> TracePredictions(
    const std::vector<TraceRow> &trace) {
  std::map<std::string, std::vector<Triplet>> predictions;
  for (const TraceRow &row : trace) predictions[row.sentence_id] = row.triplets;
  return predictions;
}

void WriteReport(const std::filesystem::path &dir, const MetricsReport &report,
                 const char *json_name, const char *csv_name) {
  WriteFileAtomically(dir / json_name, report.ToJson().dump(2) + "\n");
  WriteFileAtomically(dir / csv_name, report.ToCsv());
}

}  // namespace

std::string TraceToJsonl(const std::vector<TraceRow> &trace) {
  std::string out;
  for (const TraceRow &row : trace) {
    nlohmann::ordered_json j;
    j["sentence_id"] = row.sentence_id;
    j["epoch"] = row.epoch;
    j["batch"] = row.batch_index;
    j["prompt_version"] = row.prompt_version;
    j["metrics_total"] = row.metrics_total;
    j["num_triplets"] = row.num_triplets;
    j["status"] = SampleStatusName(row.status);
    j["triplets"] = TripletsJson(row.triplets);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string WindowScoresCsv(const std::vector<TraceRow> &trace,
                            std::span<const SentenceRecord> dataset,
                            std::size_t window) {
  CheckPrecondition(window >= 1, "window >= 1");
  std::map<std::string, const SentenceRecord *> by_id;
  for (const SentenceRecord &r : dataset) by_id[r.id] = &r;

  std::string csv =
      "window,first_row,last_row,samples,mean_consistency,partial_f1,strict_f1,exact_f1\n";
  for (std::size_t begin = 0, w = 0; begin < trace.size(); begin += window, ++w) {
    const std::size_t end = std::min(trace.size(), begin + window);
    double total = 0.0;
    MetricsAccumulator accumulator;
    bool has_gold = true;
    for (std::size_t i = begin; i < end; ++i) {
      total += trace[i].metrics_total;
      auto it = by_id.find(trace[i].sentence_id);
      if (it == by_id.end() || !it->second->gold) {
        has_gold = false;
        continue;
      }
      accumulator.Add(trace[i].triplets, *it->second->gold);
    }
    csv += std::to_string(w) + "," + std::to_string(begin) + "," +
           std::to_string(end - 1) + "," + std::to_string(end - begin) + "," +
           FormatFixed(total / static_cast<double>(end - begin));
    const MetricsReport report = accumulator.Report();
    for (MatchMode mode : kAllMatchModes) {
      csv += ",";
      if (has_gold) csv += FormatFixed(report[mode].f1);
    }
    csv += "\n";
  }
  return csv;
}

MetricsReport EvaluatePredictions(
    std::span<const SentenceRecord> dataset,
    const std::map<std::string, std::vector<Triplet>> &predictions) {
  MetricsAccumulator accumulator;
  static const std::vector<Triplet> kNone;
  for (const SentenceRecord &record : dataset) {
    if (!record.gold) {
      throw Error(ErrorCode::kMissingGold,
                  "sentence " + record.id + " has no gold triplets");
    }
    auto it = predictions.find(record.id);
    accumulator.Add(it == predictions.end() ? kNone : it->second, *record.gold);
  }
  return accumulator.Report();
}

std::unique_ptr<SchemaScorer> MakeScorer(const PipelineConfig &config) {
  if (config.scorer == ScorerBackend::kLexical) {
    return std::make_unique<LexicalScorer>();
  }
  auto remote = std::make_unique<RemoteScorer>(
      RemoteScorer::Options{.endpoint = config.scorer_endpoint});
  if (!config.scorer_fallback) return remote;
  return std::make_unique<FallbackScorer>(std::move(remote),
                                          std::make_unique<LexicalScorer>());
}

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<ChatTransport> transport,
                   std::unique_ptr<SchemaScorer> scorer, RetryPolicy retry)
    : config_((config.Validate(), std::move(config))),
      assets_(LoadAssets(config_)),
      gateway_(std::make_shared<LlmGateway>(
          std::make_shared<ReplayStore>(config_.replay_dir, config_.replay),
          std::move(transport), retry)),
      scorer_(scorer ? std::move(scorer) : MakeScorer(config_)),
      evaluator_(*gateway_, assets_, ConsistencyScores{}, config_.parallelism) {}

PromptState Pipeline::InitialPrompt() const {
  return PromptState(assets_.initial_orte_prompt);
}

Phase1Result Pipeline::RunPhase1(std::span<const SentenceRecord> dataset) {
  OptimizerOptions options;
  options.batch_size = config_.batch_size;
  options.context_budget = config_.context_budget;
  options.guarded_updates = config_.guarded_updates;
  options.parallelism = config_.parallelism;
  PromptOptimizer optimizer(*gateway_, assets_, evaluator_, options);

  Phase1Result result{InitialPrompt(), {}};
  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    result.prompt = optimizer.RunEpoch(dataset, result.prompt, epoch, &result.trace);
    LOG(INFO) << "epoch " << epoch << " done, prompt version "
              << result.prompt.version();
  }

  std::filesystem::create_directories(config_.out_dir);
  WriteFileAtomically(config_.out_dir / kPromptFinalFile, result.prompt.text() + "\n");
  WriteFileAtomically(config_.out_dir / kTraceFile, TraceToJsonl(result.trace));
  WriteFileAtomically(config_.out_dir / kScoresWindowFile,
                      WindowScoresCsv(result.trace, dataset));
  if (config_.eval_during_optimize) {
    if (AllHaveGold({dataset.begin(), dataset.end()})) {
      // Scores the final epoch's extractions.
      std::vector<TraceRow> last;
      for (const TraceRow &row : result.trace) {
        if (row.epoch == config_.epochs - 1) last.push_back(row);
      }
      WriteReport(config_.out_dir,
                  EvaluatePredictions(dataset, TracePredictions(last)),
                  kOptimizeMetricsJsonFile, kOptimizeMetricsCsvFile);
    } else {
      LOG(WARNING) << "eval during optimize skipped: dataset lacks gold";
    }
  }
  return result;
}

KnowledgeGraph Pipeline::RunPhase2(std::span<const SentenceRecord> dataset,
                                   const PromptState &prompt) {
  memory_ = config_.seed_relations ? SchemaMemory::LoadSeedFile(*config_.seed_relations)
                                   : SchemaMemory();

  struct Prepared {
    std::vector<Triplet> triplets;
    std::vector<std::string> restored;
  };
  std::vector<Prepared> prepared(dataset.size());
  ParallelFor(dataset.size(), config_.parallelism, [&](std::size_t i) {
    const SentenceRecord &sentence = dataset[i];
    Prepared &p = prepared[i];
    try {
      p.triplets = ExtractTriplets(prompt, sentence, *gateway_).triplets;
    } catch (const Error &e) {
      if (e.code() == ErrorCode::kEmptyExtraction) {
        LOG(INFO) << "sentence " << sentence.id << ": no triplets";
      } else {
        LOG(WARNING) << "sentence " << sentence.id << " skipped: " << e.what();
      }
      return;
    }
    for (const Triplet &t : p.triplets) {
      try {
        p.restored.push_back(evaluator_.RestoreTriplet(t));
      } catch (const Error &e) {
        LOG(WARNING) << "sentence " << sentence.id << ": restore failed for "
                     << RenderTriplet(t) << " (" << e.what()
                     << "), using the linearized triplet";
        p.restored.push_back(t.subject + " " + t.relation + " " + t.object);
      }
    }
  });

  // Memory mutation is order-dependent, so canonicalization runs in dataset
  // order on this thread.
  LlmRelationDecider decider(*gateway_, assets_);
  Canonicalizer canonicalizer(memory_, *scorer_, decider, config_.top_k);
  KnowledgeGraph kg;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t j = 0; j < prepared[i].triplets.size(); ++j) {
      kg.Insert(canonicalizer.Canonicalize(dataset[i], prepared[i].triplets[j],
                                           prepared[i].restored[j]));
    }
  }
  LOG(INFO) << "knowledge graph: " << kg.size() << " triples, memory: "
            << memory_.size() << " relations";

  std::filesystem::create_directories(config_.out_dir);
  kg.Export(config_.out_dir / kKgFile);
  memory_.Save(config_.out_dir / kMemoryFile);
  return kg;
}

MetricsReport Pipeline::RunEval(std::span<const SentenceRecord> dataset,
                                const KnowledgeGraph &kg) {
  const MetricsReport report = EvaluatePredictions(dataset, kg.TripletsBySentence());
  std::filesystem::create_directories(config_.out_dir);
  WriteReport(config_.out_dir, report, kMetricsJsonFile, kMetricsCsvFile);
  return report;
}

}  // namespace krpo
