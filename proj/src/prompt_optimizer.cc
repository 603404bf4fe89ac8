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

#include "krpo/prompt_optimizer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "glog/logging.h"
#include "krpo/error.h"
#include "krpo/parallel.h"
#include "krpo/text.h"

namespace krpo {
namespace {

constexpr std::string_view kVariableOpen = "<VARIABLE>";
constexpr std::string_view kVariableClose = "</VARIABLE>";

void EraseAll(std::string &s, std::string_view token) {
  for (std::size_t pos = s.find(token); pos != std::string::npos;
       pos = s.find(token, pos)) {
    s.erase(pos, token.size());
  }
}

std::string SampleBlock(const GradientRecord &entry, std::string_view guidance) {
  std::string block = "### Sample " + entry.sentence_id + "\n";
  block += "Sentence: " + entry.sentence_text + "\n";
  block += "Triplets: " + RenderTripletLine(entry.triplets) + "\n";
  block += "Guidance: ";
  block += guidance;
  return block;
}

std::string JoinBlocks(const std::vector<const GradientRecord *> &entries,
                       const std::vector<std::string> &guidance) {
  std::string out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += SampleBlock(*entries[i], guidance[i]);
  }
  return out;
}

// Largest cap c with sum(min(len_i, c)) <= available.
std::size_t CommonCap(std::vector<std::size_t> lengths, std::size_t available) {
  std::sort(lengths.begin(), lengths.end());
  std::size_t used = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    std::size_t remaining = lengths.size() - i;
    if (used + lengths[i] * remaining > available) {
      return (available - used) / remaining;
    }
    used += lengths[i];
  }
  return lengths.empty() ? 0 : lengths.back();
}

double Mean(const std::vector<double> &values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace

std::string_view SampleStatusName(SampleStatus status) {
  switch (status) {
    case SampleStatus::kOk: return "ok";
    case SampleStatus::kEmptyExtraction: return "empty_extraction";
    case SampleStatus::kExtractFailed: return "extract_failed";
    case SampleStatus::kGradientFailed: return "gradient_failed";
  }
  return "ok";
}

std::string FormatScore(double value) {
  if (value == std::floor(value) && std::abs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", value);
  return buffer;
}

std::string RenderEvaluatedTriplets(const SentenceEvaluation &evaluation) {
  if (evaluation.evaluations.empty()) return "(none)";
  std::string out;
  for (const TripletEvaluation &eval : evaluation.evaluations) {
    if (!out.empty()) out.push_back('\n');
    out += RenderTriplet(eval.triplet) + " (label: " +
           std::string(NliLabelName(eval.label)) +
           ", score: " + FormatScore(eval.score) + ")";
  }
  return out;
}

std::string RenderMetrics(const SentenceEvaluation &evaluation) {
  std::string out;
  for (std::size_t i = 0; i < evaluation.evaluations.size(); ++i) {
    const TripletEvaluation &eval = evaluation.evaluations[i];
    out += "Triplet " + std::to_string(i + 1) + ": " +
           std::string(NliLabelName(eval.label)) + " -> " +
           FormatScore(eval.score) + "\n";
  }
  out += "Total: " + FormatScore(evaluation.total);
  return out;
}

std::string RenderTripletLine(const std::vector<Triplet> &triplets) {
  if (triplets.empty()) return "(none)";
  std::string out;
  for (const Triplet &t : triplets) {
    if (!out.empty()) out += "; ";
    out += RenderTriplet(t);
  }
  return out;
}

std::string BuildContext(const FeedbackBuffer &buffer, std::size_t budget) {
  CheckPrecondition(!buffer.entries.empty(), "feedback buffer non-empty");
  std::vector<const GradientRecord *> entries;
  for (const GradientRecord &entry : buffer.entries) entries.push_back(&entry);
  std::stable_sort(entries.begin(), entries.end(),
                   [](const GradientRecord *a, const GradientRecord *b) {
                     return a->sentence_id < b->sentence_id;
                   });

  std::vector<std::string> guidance;
  for (const GradientRecord *entry : entries) guidance.push_back(entry->grad2);
  std::string full = JoinBlocks(entries, guidance);
  if (full.size() <= budget) return full;

  std::vector<std::string> empty(entries.size());
  std::size_t overhead = JoinBlocks(entries, empty).size();
  std::size_t available = budget > overhead ? budget - overhead : 0;
  std::vector<std::size_t> lengths;
  for (const std::string &g : guidance) lengths.push_back(g.size());
  std::size_t cap = CommonCap(lengths, available);
  for (std::string &g : guidance) g = TruncateUtf8(g, cap);
  // Sentences alone can exceed the budget; the hard cut keeps the bound.
  return TruncateUtf8(JoinBlocks(entries, guidance), budget);
}

std::string RecoverPromptText(std::string_view response) {
  std::vector<std::string> lines = SplitLines(response);
  std::size_t first = 0;
  while (first < lines.size() && Trim(lines[first]).empty()) ++first;
  std::size_t last = lines.size();
  while (last > first && Trim(lines[last - 1]).empty()) --last;
  std::string text;
  for (std::size_t i = first; i < last; ++i) {
    if (i > first) text.push_back('\n');
    text += lines[i];
  }
  std::size_t open = text.find(kVariableOpen);
  std::size_t close = text.rfind(kVariableClose);
  if (open != std::string::npos && close != std::string::npos && close > open) {
    text = text.substr(open + kVariableOpen.size(),
                       close - open - kVariableOpen.size());
  }
  EraseAll(text, kVariableOpen);
  EraseAll(text, kVariableClose);
  return Trim(text);
}

PromptOptimizer::PromptOptimizer(LlmGateway &gateway, const PromptAssets &assets,
                                 const SelfEvaluator &evaluator,
                                 OptimizerOptions options)
    : gateway_(gateway),
      assets_(assets),
      evaluator_(evaluator),
      options_(options) {
  CheckPrecondition(options_.batch_size >= 1, "batch size >= 1");
}

std::string PromptOptimizer::GenEvalFeedback(
    const SentenceEvaluation &evaluation) const {
  ChatRequest req;
  req.user_text = RenderTemplate(
      assets_.i1_template, {{"Triplets", RenderEvaluatedTriplets(evaluation)},
                            {"Metrics", RenderMetrics(evaluation)}});
  req.role = CallRole::kGrad1;
  std::string text = gateway_.Complete(req).text;
  if (Trim(text).empty()) {
    throw Error(ErrorCode::kGradientEmpty,
                "empty evaluation feedback for " + evaluation.sentence_id);
  }
  return text;
}

std::string PromptOptimizer::GenPromptGuidance(
    const PromptState &prompt, const SentenceRecord &sentence,
    const std::vector<Triplet> &triplets, const std::string &grad1) const {
  CheckPrecondition(!Trim(grad1).empty(), "evaluation feedback non-empty");
  std::string triplet_lines = "(none)";
  if (!triplets.empty()) {
    triplet_lines.clear();
    for (const Triplet &t : triplets) {
      if (!triplet_lines.empty()) triplet_lines.push_back('\n');
      triplet_lines += RenderTriplet(t);
    }
  }
  ChatRequest req;
  req.user_text = RenderTemplate(assets_.i2_template,
                                 {{"Prompt", prompt.text()},
                                  {"Sentence", sentence.text},
                                  {"Triplets", triplet_lines},
                                  {"Feedback", grad1}});
  req.role = CallRole::kGrad2;
  std::string text = gateway_.Complete(req).text;
  if (Trim(text).empty()) {
    throw Error(ErrorCode::kGradientEmpty,
                "empty prompt guidance for " + sentence.id);
  }
  return text;
}

PromptState PromptOptimizer::UpdatePrompt(const PromptState &prompt,
                                          const FeedbackBuffer &buffer) const {
  CheckPrecondition(!buffer.entries.empty(), "feedback buffer non-empty");
  ChatRequest req;
  req.user_text = RenderTemplate(
      assets_.i3_template,
      {{"Prompt", prompt.text()},
       {"Context", BuildContext(buffer, options_.context_budget)}});
  req.role = CallRole::kUpdate;
  std::string recovered;
  try {
    recovered = RecoverPromptText(gateway_.Complete(req).text);
  } catch (const Error &e) {
    LOG(WARNING) << "prompt update skipped for batch " << buffer.batch_index
                 << ": " << e.what();
    return prompt;
  }
  if (recovered.empty()) {
    LOG(WARNING) << "prompt update skipped for batch " << buffer.batch_index
                 << ": reply contained no prompt";
    return prompt;
  }
  return prompt.WithRevision(std::move(recovered), buffer.batch_index);
}

PromptOptimizer::SampleOutcome PromptOptimizer::ProcessSample(
    const SentenceRecord &sentence, const PromptState &prompt) const {
  SampleOutcome outcome;
  TraceRow &row = outcome.row;
  row.sentence_id = sentence.id;
  row.prompt_version = prompt.version();

  ExtractionResult extraction;
  extraction.sentence_id = sentence.id;
  try {
    extraction = ExtractTriplets(prompt, sentence, gateway_);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::kEmptyExtraction) {
      LOG(WARNING) << "extraction failed: " << e.what();
      row.status = SampleStatus::kExtractFailed;
      return outcome;
    }
    row.status = SampleStatus::kEmptyExtraction;
  }

  SentenceEvaluation evaluation =
      evaluator_.EvaluateSentence(sentence, extraction);
  // Range check: total lies in [M * lowest score, M * highest score].
  const ConsistencyScores &scores = evaluator_.scores();
  const double count = static_cast<double>(evaluation.evaluations.size());
  const double lowest = std::min({0.0, scores.entailment, scores.neutral,
                                  scores.contradiction});
  const double highest = std::max({0.0, scores.entailment, scores.neutral,
                                   scores.contradiction});
  CHECK(evaluation.total <= count * highest + 1e-9 &&
        evaluation.total >= count * lowest - 1e-9)
      << "sentence score out of range for " << sentence.id;
  row.metrics_total = evaluation.total;
  row.num_triplets = static_cast<int>(extraction.triplets.size());
  row.triplets = extraction.triplets;

  try {
    GradientRecord &gradient = outcome.gradient;
    gradient.sentence_id = sentence.id;
    gradient.sentence_text = sentence.text;
    gradient.triplets = extraction.triplets;
    gradient.metrics_total = evaluation.total;
    gradient.grad1 = GenEvalFeedback(evaluation);
    gradient.grad2 = GenPromptGuidance(prompt, sentence, extraction.triplets,
                                       gradient.grad1);
    outcome.has_gradient = true;
  } catch (const Error &e) {
    LOG(WARNING) << "gradient generation failed: " << e.what();
    row.status = SampleStatus::kGradientFailed;
  }
  return outcome;
}

PromptState PromptOptimizer::RunEpoch(std::span<const SentenceRecord> dataset,
                                      PromptState prompt, int epoch,
                                      std::vector<TraceRow> *trace) {
  const std::size_t batch_size = static_cast<std::size_t>(options_.batch_size);
  for (std::size_t begin = 0; begin < dataset.size(); begin += batch_size) {
    const std::size_t end = std::min(dataset.size(), begin + batch_size);
    const int batch_index = next_batch_index_++;

    std::vector<SampleOutcome> outcomes(end - begin);
    ParallelFor(outcomes.size(), options_.parallelism, [&](std::size_t i) {
      outcomes[i] = ProcessSample(dataset[begin + i], prompt);
    });

    FeedbackBuffer buffer;
    buffer.batch_index = batch_index;
    buffer.capacity = options_.batch_size;
    std::vector<double> batch_scores;
    for (SampleOutcome &outcome : outcomes) {
      outcome.row.epoch = epoch;
      outcome.row.batch_index = batch_index;
      if (outcome.row.status != SampleStatus::kExtractFailed) {
        batch_scores.push_back(outcome.row.metrics_total);
      }
      if (outcome.has_gradient) {
        buffer.entries.push_back(std::move(outcome.gradient));
      }
      if (trace != nullptr) trace->push_back(std::move(outcome.row));
    }
    std::sort(buffer.entries.begin(), buffer.entries.end(),
              [](const GradientRecord &a, const GradientRecord &b) {
                return a.sentence_id < b.sentence_id;
              });

    if (options_.guarded_updates) {
      const double mean = Mean(batch_scores);
      if (guard_pending_ && mean < guard_previous_mean_) {
        LOG(INFO) << "guarded update: batch " << batch_index << " mean "
                  << mean << " < " << guard_previous_mean_
                  << ", reverting prompt";
        prompt = prompt.WithRevision(guard_previous_text_, batch_index);
        guard_pending_ = false;
        guard_previous_mean_ = mean;
        continue;
      }
      guard_previous_mean_ = mean;
      guard_pending_ = false;
    }

    if (buffer.entries.empty()) {
      LOG(WARNING) << "batch " << batch_index << " produced no feedback";
      continue;
    }
    const int version_before = prompt.version();
    std::string text_before = prompt.text();
    prompt = UpdatePrompt(prompt, buffer);
    if (options_.guarded_updates && prompt.version() != version_before) {
      guard_pending_ = true;
      guard_previous_text_ = std::move(text_before);
    }
  }
  return prompt;
}

}  // namespace krpo
