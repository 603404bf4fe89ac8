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

#include "krpo/extractor.h"

#include <random>

#include <gtest/gtest.h>

#include "krpo/error.h"
#include "krpo/prompts.h"
#include "testing/case_study.h"
#include "testing/scripted_transport.h"

namespace krpo {
namespace {

namespace ad = testing::case_study;
using Triplets = std::vector<Triplet>;

SentenceRecord Pontiac() { return {ad::kSentenceId, ad::kSentence, std::nullopt}; }

TEST(AssembleExtractionPromptTest, PromptInSystemSentenceInUser) {
  const PromptState p(PromptAssets::Embedded().initial_orte_prompt);
  const ChatRequest req = AssembleExtractionPrompt(p, Pontiac());
  ASSERT_TRUE(req.system_text.has_value());
  EXPECT_EQ(req.system_text->rfind(
                "Your task is to transform the given text into a semantic graph", 0),
            0u);
  EXPECT_EQ(req.user_text, ad::kSentence);
  EXPECT_EQ(req.role, CallRole::kExtract);
  EXPECT_EQ(req.temperature, 0.0);
}

TEST(AssembleExtractionPromptTest, EmptyPromptViolatesPrecondition) {
  EXPECT_THROW(AssembleExtractionPrompt(PromptState(""), Pontiac()), Error);
}

TEST(AssembleExtractionPromptTest, PromptChangesFingerprint) {
  const PromptState p(PromptAssets::Embedded().initial_orte_prompt);
  const PromptState p_star(ad::kOptimizedPrompt);
  EXPECT_NE(RequestFingerprint(AssembleExtractionPrompt(p, Pontiac())),
            RequestFingerprint(AssembleExtractionPrompt(p_star, Pontiac())));
}

TEST(ParseTripletListTest, CaseStudyLines) {
  const ParsedTriplets parsed = ParseTripletList(
      "[Pontiac Rageous, assembly, Detroit]\n[Pontiac Rageous, buildDate, 1997]\n"
      "[Pontiac Rageous, state, Michigan]");
  EXPECT_EQ(parsed.triplets, ad::InitialTriplets());
  EXPECT_EQ(parsed.failures, 0);
}

TEST(ParseTripletListTest, JsonArray) {
  const ParsedTriplets parsed = ParseTripletList(R"([["a","b","c"]])");
  EXPECT_EQ(parsed.triplets, (Triplets{{"a", "b", "c"}}));
  EXPECT_EQ(parsed.failures, 0);
}

TEST(ParseTripletListTest, ProseAndOneMalformedLine) {
  const ParsedTriplets parsed = ParseTripletList("Here are the triplets:\n[a, b]\n[x, y, z]");
  EXPECT_EQ(parsed.triplets, (Triplets{{"x", "y", "z"}}));
  EXPECT_EQ(parsed.failures, 1);
}

TEST(ParseTripletListTest, JsonBadElementsAreFailures) {
  const ParsedTriplets parsed = ParseTripletList(R"([["a","b","c"], ["x","y"], 5])");
  EXPECT_EQ(parsed.triplets, (Triplets{{"a", "b", "c"}}));
  EXPECT_EQ(parsed.failures, 2);
}

TEST(ParseTripletListTest, ProseOnlyIsEmptyExtraction) {
  try {
    ParseTripletList("Sorry, I cannot help with that.");
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyExtraction);
  }
}

TEST(ParseTripletListTest, ExplicitEmptyListAndBlankAreNotErrors) {
  EXPECT_TRUE(ParseTripletList("[]").triplets.empty());
  EXPECT_TRUE(ParseTripletList("  \n").triplets.empty());
  EXPECT_TRUE(ParseTripletList(R"({"triplets": []})").triplets.empty());
}

TEST(ParseTripletListTest, EmissionOrderPreserved) {
  const ParsedTriplets parsed = ParseTripletList("[z, z, z]\n[a, a, a]\n[m, m, m]");
  EXPECT_EQ(parsed.triplets, (Triplets{{"z", "z", "z"}, {"a", "a", "a"}, {"m", "m", "m"}}));
}

// parsed + failures covers every line that is a bracketed tuple.
TEST(ParseTripletListTest, EveryTupleLineIsAccounted) {
  std::mt19937 rng(3);
  const char *lines[] = {"[a, b, c]", "[a, b]", "(p, q, r)", "[1, 2, 3, 4]",
                         "Some prose here.", "[x, , z]", "- [m, n, o]", ""};
  for (int trial = 0; trial < 300; ++trial) {
    std::string raw;
    int tuple_lines = 0;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      const int k = static_cast<int>(rng() % std::size(lines));
      raw += std::string(lines[k]) + "\n";
      if (k != 4 && k != 7) ++tuple_lines;
    }
    try {
      const ParsedTriplets parsed = ParseTripletList(raw);
      EXPECT_GE(static_cast<int>(parsed.triplets.size()) + parsed.failures, tuple_lines) << raw;
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::kEmptyExtraction);
    }
  }
}

TEST(DeduplicateTripletsTest, KeepsFirstOccurrence) {
  EXPECT_EQ(DeduplicateTriplets({{"a", "b", "c"}, {"x", "y", "z"}, {"a", "b", "c"}}),
            (Triplets{{"a", "b", "c"}, {"x", "y", "z"}}));
}

class ExtractTripletsTest : public ::testing::Test {
 protected:
  ExtractTripletsTest()
      : transport_(std::make_shared<testing::ScriptedTransport>(ad::Rules())),
        gateway_(std::make_shared<ReplayStore>(dir_.path(), ReplayMode::kPassthrough),
                 transport_, testing::NoBackoff()) {}

  testing::TempDir dir_;
  std::shared_ptr<testing::ScriptedTransport> transport_;
  LlmGateway gateway_;
};

TEST_F(ExtractTripletsTest, InitialPromptGivesThreeTriplets) {
  const ExtractionResult result = ExtractTriplets(
      PromptState(PromptAssets::Embedded().initial_orte_prompt), Pontiac(), gateway_);
  EXPECT_EQ(result.sentence_id, ad::kSentenceId);
  EXPECT_EQ(result.triplets, ad::InitialTriplets());
  EXPECT_EQ(result.parse_failures, 0);
}

TEST_F(ExtractTripletsTest, OptimizedPromptGivesFourTriplets) {
  const ExtractionResult result =
      ExtractTriplets(PromptState(ad::kOptimizedPrompt), Pontiac(), gateway_);
  EXPECT_EQ(result.triplets, ad::OptimizedTriplets());
  EXPECT_EQ(result.triplets.front(), (Triplet{"Detroit", "state", "Michigan"}));
}

TEST(ExtractTripletsReplayTest, MissCarriesSentenceId) {
  testing::TempDir dir;
  LlmGateway gateway(std::make_shared<ReplayStore>(dir.path(), ReplayMode::kReplay),
                     std::make_shared<testing::PanickingTransport>());
  try {
    ExtractTriplets(PromptState("p"), Pontiac(), gateway);
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kReplayMiss);
    EXPECT_NE(std::string(e.what()).find(ad::kSentenceId), std::string::npos);
  }
}

}  // namespace
}  // namespace krpo
