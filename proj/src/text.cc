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

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace krpo {
namespace {

icu::UnicodeString FromUtf8(std::string_view text) {
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
}

std::string ToUtf8(const icu::UnicodeString &text) {
  std::string out;
  text.toUTF8String(out);
  return out;
}

const icu::Normalizer2 &NfcInstance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || nfc == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *nfc;
}

icu::UnicodeString NfcUnicode(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString normalized = NfcInstance().normalize(FromUtf8(text), status);
  if (U_FAILURE(status)) return FromUtf8(text);
  return normalized;
}

}  // namespace

std::string Nfc(std::string_view text) { return ToUtf8(NfcUnicode(text)); }

std::string ToLower(std::string_view text) {
  icu::UnicodeString u = FromUtf8(text);
  u.toLower(icu::Locale::getRoot());
  return ToUtf8(u);
}

std::string Trim(std::string_view text) {
  icu::UnicodeString u = FromUtf8(text);
  int32_t begin = 0;
  int32_t end = u.length();
  while (begin < end && u_isUWhiteSpace(u.char32At(begin))) {
    begin = u.moveIndex32(begin, 1);
  }
  while (end > begin) {
    int32_t prev = u.moveIndex32(end, -1);
    if (!u_isUWhiteSpace(u.char32At(prev))) break;
    end = prev;
  }
  return ToUtf8(u.tempSubStringBetween(begin, end));
}

std::vector<std::string> NormalizeText(std::string_view raw) {
  icu::UnicodeString u = NfcUnicode(raw);
  u.toLower(icu::Locale::getRoot());

  std::vector<std::string> tokens;
  const int32_t n = u.length();
  int32_t i = 0;
  while (i < n) {
    while (i < n && u_isUWhiteSpace(u.char32At(i))) i = u.moveIndex32(i, 1);
    if (i >= n) break;
    int32_t start = i;
    while (i < n && !u_isUWhiteSpace(u.char32At(i))) i = u.moveIndex32(i, 1);
    int32_t end = i;

    while (start < end && u_ispunct(u.char32At(start))) {
      start = u.moveIndex32(start, 1);
    }
    while (end > start) {
      int32_t prev = u.moveIndex32(end, -1);
      if (!u_ispunct(u.char32At(prev))) break;
      end = prev;
    }
    if (start < end) tokens.push_back(ToUtf8(u.tempSubStringBetween(start, end)));
  }
  return tokens;
}

std::string NormalizedKey(std::string_view raw) {
  std::string key;
  for (const std::string &token : NormalizeText(raw)) {
    if (!key.empty()) key.push_back(' ');
    key += token;
  }
  return key;
}

std::u32string ToCodePoints(std::string_view utf8) {
  std::u32string out;
  int32_t i = 0;
  const int32_t n = static_cast<int32_t>(utf8.size());
  const auto *bytes = reinterpret_cast<const uint8_t *>(utf8.data());
  while (i < n) {
    UChar32 c;
    U8_NEXT(bytes, i, n, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

std::vector<std::string> SplitLines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::string TruncateUtf8(std::string_view text, std::size_t max_bytes) {
  if (text.size() <= max_bytes) return std::string(text);
  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) {
    --cut;
  }
  return std::string(text.substr(0, cut));
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return ToLower(a) == ToLower(b);
}

}  // namespace krpo
