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

#ifndef KRPO_TEXT_H_
#define KRPO_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace krpo {

// Unicode NFC normalization of UTF-8 text. Invalid sequences are replaced
// by U+FFFD.
std::string Nfc(std::string_view text);

// Full Unicode lowercasing.
std::string ToLower(std::string_view text);

// Strips leading and trailing Unicode whitespace.
std::string Trim(std::string_view text);

// Token normalization shared by matching and graph keys: NFC, lowercase,
// whitespace split, then leading/trailing punctuation stripped from each
// token. Tokens that are pure punctuation vanish.
//
//   "Pontiac Rageous" -> {"pontiac", "rageous"}
//   "  buildDate. "   -> {"builddate"}
std::vector<std::string> NormalizeText(std::string_view raw);

// NormalizeText joined by single spaces.
std::string NormalizedKey(std::string_view raw);

std::u32string ToCodePoints(std::string_view utf8);

// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string> SplitLines(std::string_view text);

// Longest prefix of at most max_bytes that ends on a code point boundary.
std::string TruncateUtf8(std::string_view text, std::size_t max_bytes);

bool EqualsIgnoreCase(std::string_view a, std::string_view b);

}  // namespace krpo

#endif  // KRPO_TEXT_H_
