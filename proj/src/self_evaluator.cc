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

#include "krpo/self_evaluator.h"

#include <algorithm>

#include "json.hpp"
#include "krpo/error.h"
#include "krpo/parallel.h"
#include "krpo/text.h"

namespace krpo {
namespace {

// First balanced {...} span, ignoring braces inside JSON strings.
std::optional<std::string_view> FirstBalancedObject(std::string_view text) {
  std::size_t start = text.find('{');
  while (start != std::string_view::npos) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}' && --depth == 0) {
        return text.substr(start, i - start + 1);
      }
    }
    start = text.find('{', start + 1);
  }
  return std::nullopt;
}

std::string TripletForRestoration(const Triplet &t) {
  return "(" + t.subject + ", " + t.relation + ", " + t.object + ")";
}

}  // namespace

std::string_view NliLabelName(NliLabel label) {
  switch (label) {
    case NliLabel::kEntailment: return "entailment";
    case NliLabel::kNeutral: return "neutral";
    case NliLabel::kContradiction: return "contradiction";
  }
  return "neutral";
}

std::optional<NliLabel> ParseNliLabel(std::string_view text) {
  std::string lowered = ToLower(Trim(text));
  for (NliLabel label : {NliLabel::kEntailment, NliLabel::kNeutral,
                         NliLabel::kContradiction}) {
    if (lowered == NliLabelName(label)) return label;
  }
  return std::nullopt;
}

double ScoreLabel(NliLabel label, const ConsistencyScores &scores) {
  switch (label) {
    case NliLabel::kEntailment: return scores.entailment;
    case NliLabel::kNeutral: return scores.neutral;
    case NliLabel::kContradiction: return scores.contradiction;
  }
  return scores.neutral;
}

NliJudgement ParseNliResponse(std::string_view response) {
  std::optional<std::string_view> block = FirstBalancedObject(response);
  if (!block) {
    throw Error(ErrorCode::kNliParseError, "no JSON object in judge reply");
  }
  nlohmann::json doc = nlohmann::json::parse(*block, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kNliParseError, "unparseable judge JSON: " +
                                               std::string(block->substr(0, 120)));
  }
  auto label_it = doc.find("label");
  if (label_it == doc.end() || !label_it->is_string()) {
    throw Error(ErrorCode::kNliParseError, "judge JSON has no string label");
  }
  std::optional<NliLabel> label = ParseNliLabel(label_it->get<std::string>());
  if (!label) {
    throw Error(ErrorCode::kNliParseError,
                "illegal label '" + label_it->get<std::string>() + "'");
  }
  NliJudgement judgement;
  judgement.label = *label;
  auto confidence_it = doc.find("confidence");
  if (confidence_it != doc.end()) {
    double confidence = 0.0;
    if (confidence_it->is_number()) {
      confidence = confidence_it->get<double>();
    } else if (confidence_it->is_string()) {
      try {
        confidence = std::stod(confidence_it->get<std::string>());
      } catch (const std::exception &) {
        confidence = 0.0;
      }
    }
    judgement.confidence = std::clamp(confidence, 0.0, 1.0);
  }
  auto reasoning_it = doc.find("reasoning");
  if (reasoning_it != doc.end() && reasoning_it->is_string()) {
    judgement.reasoning = reasoning_it->get<std::string>();
  }
  return judgement;
}

SelfEvaluator::SelfEvaluator(LlmGateway &gateway, const PromptAssets &assets,
                             ConsistencyScores scores, int parallelism)
    : gateway_(gateway),
      assets_(assets),
      scores_(scores),
      parallelism_(parallelism) {}

std::string SelfEvaluator::RestoreTriplet(const Triplet &t) const {
  CheckPrecondition(t.IsValid(), "triplet fields non-empty");
  ChatRequest req;
  req.user_text =
      RenderTemplate(assets_.kr_prompt, {{"Triplet", TripletForRestoration(t)}});
  req.role = CallRole::kRestore;
  std::string reply = gateway_.Complete(req).text;
  for (const std::string &line : SplitLines(reply)) {
    std::string trimmed = Trim(line);
    if (!trimmed.empty()) return trimmed;
  }
  throw Error(ErrorCode::kEmptyRestoration,
              "empty restoration for " + RenderTriplet(t));
}

NliJudgement SelfEvaluator::JudgeNli(const std::string &premise,
                                     const std::string &hypothesis) const {
  CheckPrecondition(!Trim(premise).empty(), "premise non-empty");
  CheckPrecondition(!Trim(hypothesis).empty(), "hypothesis non-empty");
  ChatRequest req;
  req.user_text = RenderTemplate(
      assets_.nli_prompt, {{"Premise", premise}, {"Hypothesis", hypothesis}});
  req.role = CallRole::kNli;
  return ParseNliResponse(gateway_.Complete(req).text);
}

SentenceEvaluation SelfEvaluator::EvaluateSentence(
    const SentenceRecord &sentence, const ExtractionResult &extraction) const {
  CheckPrecondition(extraction.sentence_id == sentence.id,
                    "extraction belongs to the sentence");
  SentenceEvaluation result;
  result.sentence_id = sentence.id;
  result.evaluations.resize(extraction.triplets.size());

  ParallelFor(extraction.triplets.size(), parallelism_, [&](std::size_t i) {
    TripletEvaluation &eval = result.evaluations[i];
    eval.triplet = extraction.triplets[i];
    try {
      eval.restored_text = RestoreTriplet(eval.triplet);
      NliJudgement judgement = JudgeNli(sentence.text, eval.restored_text);
      eval.label = judgement.label;
      eval.confidence = judgement.confidence;
      eval.reasoning = std::move(judgement.reasoning);
      eval.score = ScoreLabel(eval.label, scores_);
    } catch (const Error &e) {
      eval.label = NliLabel::kNeutral;
      eval.confidence = 0.0;
      eval.reasoning = std::string("evaluation failed: ") + e.what();
      eval.score = 0.0;
    }
  });

  for (const TripletEvaluation &eval : result.evaluations) {
    result.total += eval.score;
  }
  return result;
}

}  // namespace krpo
