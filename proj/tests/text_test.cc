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

#include "krpo/text.h"

#include <random>

#include <gtest/gtest.h>

namespace krpo {
namespace {

using Tokens = std::vector<std::string>;

TEST(NormalizeTextTest, LowercasesAndSplits) {
  EXPECT_EQ(NormalizeText("Pontiac Rageous"), (Tokens{"pontiac", "rageous"}));
}

TEST(NormalizeTextTest, EmptyInput) { EXPECT_TRUE(NormalizeText("").empty()); }

TEST(NormalizeTextTest, StripsSurroundingPunctuationAndSpace) {
  EXPECT_EQ(NormalizeText("  buildDate. "), (Tokens{"builddate"}));
}

TEST(NormalizeTextTest, KeepsInnerPunctuation) {
  EXPECT_EQ(NormalizeText("\"U.S.\" (state-of-the-art)"),
            (Tokens{"u.s", "state-of-the-art"}));
}

TEST(NormalizeTextTest, DropsPunctuationOnlyTokens) {
  EXPECT_EQ(NormalizeText("a -- b ..."), (Tokens{"a", "b"}));
}

TEST(NormalizeTextTest, CollapsesUnicodeWhitespace) {
  EXPECT_EQ(NormalizeText("a \tb c\n"), (Tokens{"a", "b", "c"}));
}

TEST(NormalizeTextTest, ComposedAndDecomposedFormsAgree) {
  // "é" precomposed versus e + combining acute.
  EXPECT_EQ(NormalizeText("Café"), NormalizeText("Café"));
  EXPECT_EQ(NormalizeText("ÉCOLE"), (Tokens{"école"}));
}

TEST(NormalizeTextTest, Idempotent) {
  std::mt19937 rng(7);
  const std::string alphabet[] = {"a", "B", " ", ".", ",", "É", "-", "x", "\t", "(", ")"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const int len = static_cast<int>(rng() % 20);
    for (int i = 0; i < len; ++i) text += alphabet[rng() % std::size(alphabet)];
    const Tokens once = NormalizeText(text);
    std::string joined;
    for (const std::string &t : once) joined += t + " ";
    EXPECT_EQ(NormalizeText(joined), once) << "input: " << text;
  }
}

TEST(NormalizedKeyTest, JoinsWithSingleSpace) {
  EXPECT_EQ(NormalizedKey("  The  Pontiac, Rageous "), "the pontiac rageous");
}

TEST(TrimTest, Whitespace) {
  EXPECT_EQ(Trim("  a b \n"), "a b");
  EXPECT_EQ(Trim(""), "");
  EXPECT_EQ(Trim(" \t "), "");
}

TEST(SplitLinesTest, HandlesCrLfAndTrailingNewline) {
  EXPECT_EQ(SplitLines("a\r\nb\n"), (Tokens{"a", "b", ""}));
  EXPECT_EQ(SplitLines("x"), (Tokens{"x"}));
}

TEST(TruncateUtf8Test, NeverSplitsACodePoint) {
  const std::string text = "abéé";  // 2 + 2 + 2 bytes
  EXPECT_EQ(TruncateUtf8(text, 3), "ab");
  EXPECT_EQ(TruncateUtf8(text, 4), "abé");
  EXPECT_EQ(TruncateUtf8(text, 100), text);
}

TEST(ToCodePointsTest, DecodesAndReplacesInvalid) {
  EXPECT_EQ(ToCodePoints("aé"), (std::u32string{U'a', U'é'}));
  EXPECT_EQ(ToCodePoints("a\xff"), (std::u32string{U'a', U'�'}));
}

TEST(EqualsIgnoreCaseTest, CaseFolds) {
  EXPECT_TRUE(EqualsIgnoreCase("BuildDate", "builddate"));
  EXPECT_FALSE(EqualsIgnoreCase("buildDate", "buildDates"));
}

}  // namespace
}  // namespace krpo
