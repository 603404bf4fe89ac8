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

#ifndef KRPO_EXTRACTOR_H_
#define KRPO_EXTRACTOR_H_

#include <string>
#include <string_view>
#include <vector>

#include "krpo/llm_gateway.h"
#include "krpo/prompts.h"
#include "krpo/triplet.h"

namespace krpo {

struct ExtractionResult {
  std::string sentence_id;
  std::vector<Triplet> triplets;  // emission order, exact duplicates removed
  std::string raw_output;
  int parse_failures = 0;
};

struct ParsedTriplets {
  std::vector<Triplet> triplets;
  int failures = 0;
};

// The optimizable prompt rides in the system slot and the sentence in the
// user slot, so prompt and data changes hash separately.
ChatRequest AssembleExtractionPrompt(const PromptState &prompt,
                                     const SentenceRecord &sentence);

// Leniency ladder for model output:
//   1. a JSON array of 3-element arrays (or {"subject","relation","object"}
//      objects), optionally inside a code fence or surrounding prose;
//   2. otherwise a line scan for bracketed or parenthesized 3-tuples.
// Prose lines are skipped. Tuple-like groups that do not parse count as
// failures. Throws Error(kEmptyExtraction) when nothing parses and the
// output is non-empty and not an explicit empty list.
ParsedTriplets ParseTripletList(std::string_view raw);

// Drops exact duplicates, keeping the first occurrence.
std::vector<Triplet> DeduplicateTriplets(std::vector<Triplet> triplets);

// Builds the request, calls the model and parses the reply. Gateway errors
// and EmptyExtraction propagate with the sentence id in the message.
ExtractionResult ExtractTriplets(const PromptState &prompt,
                                 const SentenceRecord &sentence,
                                 LlmGateway &gateway);

}  // namespace krpo

#endif  // KRPO_EXTRACTOR_H_
