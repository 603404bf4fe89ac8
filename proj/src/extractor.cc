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

#include <algorithm>

#include <cctype>
#include <optional>
#include <set>

#include "json.hpp"
#include "krpo/error.h"
#include "krpo/text.h"

namespace krpo {
namespace {

using nlohmann::json;

bool IsBlank(std::string_view s) { return Trim(s).empty(); }

bool IsFenceLine(std::string_view line) {
  std::string trimmed = Trim(line);
  return trimmed.rfind("```", 0) == 0;
}

std::string StripCodeFences(std::string_view raw) {
  std::string out;
  for (const std::string &line : SplitLines(raw)) {
    if (IsFenceLine(line)) continue;
    out += line;
    out.push_back('\n');
  }
  return out;
}

std::optional<std::string> JsonScalarText(const json &value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number()) return value.dump();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  return std::nullopt;
}

std::optional<Triplet> TripletFromFields(const std::optional<std::string> &s,
                                         const std::optional<std::string> &r,
                                         const std::optional<std::string> &o) {
  if (!s || !r || !o) return std::nullopt;
  Triplet t{Nfc(Trim(*s)), Nfc(Trim(*r)), Nfc(Trim(*o))};
  if (!t.IsValid()) return std::nullopt;
  return t;
}

std::optional<std::string> FirstKey(const json &object,
                                    std::initializer_list<const char *> keys) {
  for (const char *key : keys) {
    auto it = object.find(key);
    if (it != object.end()) return JsonScalarText(*it);
  }
  return std::nullopt;
}

bool IsTripletShaped(const json &element) {
  return element.is_array() || element.is_object();
}

// Returns nullopt when the JSON does not have the expected shape, so the
// caller falls through to the line scan.
std::optional<ParsedTriplets> ParseJsonTriplets(const json &doc) {
  const json *list = &doc;
  if (doc.is_object()) {
    auto it = doc.find("triplets");
    if (it == doc.end()) it = doc.find("triples");
    if (it == doc.end() || !it->is_array()) return std::nullopt;
    list = &*it;
  }
  if (!list->is_array()) return std::nullopt;

  ParsedTriplets parsed;
  // A flat ["s","r","o"] is a single triplet.
  if (list->size() == 3 && !IsTripletShaped((*list)[0]) &&
      !IsTripletShaped((*list)[1]) && !IsTripletShaped((*list)[2])) {
    if (auto t = TripletFromFields(JsonScalarText((*list)[0]),
                                   JsonScalarText((*list)[1]),
                                   JsonScalarText((*list)[2]))) {
      parsed.triplets.push_back(std::move(*t));
      return parsed;
    }
    return std::nullopt;
  }
  // Stray scalars next to real triplets count as malformed entries.
  if (std::none_of(list->begin(), list->end(), IsTripletShaped)) {
    return std::nullopt;
  }
  for (const json &element : *list) {
    std::optional<Triplet> t;
    if (element.is_array() && element.size() == 3) {
      t = TripletFromFields(JsonScalarText(element[0]),
                            JsonScalarText(element[1]),
                            JsonScalarText(element[2]));
    } else if (element.is_object()) {
      t = TripletFromFields(FirstKey(element, {"subject", "head", "s"}),
                            FirstKey(element, {"relation", "predicate", "r"}),
                            FirstKey(element, {"object", "tail", "o"}));
    }
    if (t) {
      parsed.triplets.push_back(std::move(*t));
    } else {
      ++parsed.failures;
    }
  }
  return parsed;
}

std::optional<json> TryParseJson(std::string_view text) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return std::nullopt;
  return doc;
}

// Attempts the whole text, then the span between the first opening and the
// last closing bracket (models like to wrap JSON in prose).
std::optional<json> FindJsonDocument(std::string_view text) {
  std::string trimmed = Trim(text);
  if (auto doc = TryParseJson(trimmed)) return doc;
  std::size_t open = trimmed.find_first_of("[{");
  std::size_t close = trimmed.find_last_of("]}");
  if (open == std::string::npos || close == std::string::npos || close <= open) {
    return std::nullopt;
  }
  return TryParseJson(std::string_view(trimmed).substr(open, close - open + 1));
}

bool IsOpen(char c) { return c == '[' || c == '('; }
char Closer(char open) { return open == '[' ? ']' : ')'; }

struct Group {
  std::string_view inner;
  bool closed = true;
};

// Top-level bracket groups of a line. Double-quoted spans are opaque.
std::vector<Group> TopLevelGroups(std::string_view line) {
  std::vector<Group> groups;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '"') {
      std::size_t end = line.find('"', i + 1);
      if (end == std::string_view::npos) break;
      i = end + 1;
      continue;
    }
    if (!IsOpen(line[i])) {
      ++i;
      continue;
    }
    std::vector<char> stack = {Closer(line[i])};
    std::size_t start = i + 1;
    std::size_t j = start;
    bool in_quotes = false;
    for (; j < line.size() && !stack.empty(); ++j) {
      char c = line[j];
      if (in_quotes) {
        if (c == '"') in_quotes = false;
      } else if (c == '"') {
        in_quotes = true;
      } else if (IsOpen(c)) {
        stack.push_back(Closer(c));
      } else if (c == ']' || c == ')') {
        // Mismatched closers still close the innermost group.
        stack.pop_back();
      }
    }
    if (stack.empty()) {
      groups.push_back({line.substr(start, j - 1 - start), true});
      i = j;
    } else {
      groups.push_back({line.substr(start), false});
      break;
    }
  }
  return groups;
}

bool HasTopLevelComma(std::string_view inner) {
  return SplitTopLevelFields(inner).size() >= 2;
}

bool HasTupleLikeChild(std::string_view inner) {
  for (const Group &child : TopLevelGroups(inner)) {
    if (child.closed && HasTopLevelComma(child.inner)) return true;
  }
  return false;
}

void ScanGroup(const Group &group, bool line_starts_with_group,
               ParsedTriplets &out) {
  if (group.closed && HasTupleLikeChild(group.inner)) {
    for (const Group &child : TopLevelGroups(group.inner)) {
      ScanGroup(child, true, out);
    }
    return;
  }
  if (!HasTopLevelComma(group.inner)) return;
  std::size_t fields = SplitTopLevelFields(group.inner).size();
  // Inside prose only a 3-field group is taken as a tuple; a line that
  // starts with a bracket is a tuple attempt whatever its arity.
  if (!line_starts_with_group && fields != 3) return;
  if (!group.closed) {
    ++out.failures;
    return;
  }
  try {
    std::string literal = "[" + std::string(group.inner) + "]";
    out.triplets.push_back(ParseTripletLiteral(literal));
  } catch (const Error &) {
    ++out.failures;
  }
}

// Removes bullets and enumerations: "-", "*", "•", "1.", "2)", "(3)".
std::string_view StripListMarker(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  std::string_view rest = line.substr(i);
  for (std::string_view bullet : {"- ", "* ", "• ", "+ "}) {
    if (rest.rfind(bullet, 0) == 0) return rest.substr(bullet.size());
  }
  std::size_t d = 0;
  while (d < rest.size() && std::isdigit(static_cast<unsigned char>(rest[d]))) ++d;
  if (d > 0 && d < rest.size() && (rest[d] == '.' || rest[d] == ':' ||
                                   (rest[d] == ')' && rest[0] != '('))) {
    rest = rest.substr(d + 1);
    while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest[0]))) {
      rest.remove_prefix(1);
    }
  }
  return rest;
}

ParsedTriplets ScanLines(std::string_view text) {
  ParsedTriplets parsed;
  for (const std::string &line : SplitLines(text)) {
    std::string_view body = StripListMarker(line);
    bool starts_with_group = !body.empty() && IsOpen(body.front());
    for (const Group &group : TopLevelGroups(body)) {
      ScanGroup(group, starts_with_group, parsed);
    }
  }
  return parsed;
}

bool IsExplicitEmptyList(const std::optional<json> &doc) {
  if (!doc) return false;
  if (doc->is_array()) return doc->empty();
  if (doc->is_object()) {
    for (const char *key : {"triplets", "triples"}) {
      auto it = doc->find(key);
      if (it != doc->end() && it->is_array() && it->empty()) return true;
    }
  }
  return false;
}

}  // namespace

ChatRequest AssembleExtractionPrompt(const PromptState &prompt,
                                     const SentenceRecord &sentence) {
  CheckPrecondition(!Trim(prompt.text()).empty(), "prompt text non-empty");
  ChatRequest req;
  req.system_text = prompt.text();
  req.user_text = sentence.text;
  req.role = CallRole::kExtract;
  return req;
}

ParsedTriplets ParseTripletList(std::string_view raw) {
  std::string text = StripCodeFences(raw);
  std::optional<json> doc = FindJsonDocument(text);
  ParsedTriplets parsed;
  if (doc) {
    if (auto from_json = ParseJsonTriplets(*doc)) parsed = std::move(*from_json);
  }
  if (parsed.triplets.empty() && parsed.failures == 0) {
    parsed = ScanLines(text);
  }
  if (parsed.triplets.empty() && !IsBlank(raw) && !IsExplicitEmptyList(doc)) {
    throw Error(ErrorCode::kEmptyExtraction,
                "no triplet parsed from model output (" +
                    std::to_string(parsed.failures) + " malformed)");
  }
  return parsed;
}

std::vector<Triplet> DeduplicateTriplets(std::vector<Triplet> triplets) {
  std::set<Triplet> seen;
  std::vector<Triplet> unique;
  unique.reserve(triplets.size());
  for (Triplet &t : triplets) {
    Triplet key{Trim(t.subject), Trim(t.relation), Trim(t.object)};
    if (seen.insert(key).second) unique.push_back(std::move(key));
  }
  return unique;
}

ExtractionResult ExtractTriplets(const PromptState &prompt,
                                 const SentenceRecord &sentence,
                                 LlmGateway &gateway) {
  ChatRequest req = AssembleExtractionPrompt(prompt, sentence);
  ExtractionResult result;
  result.sentence_id = sentence.id;
  try {
    result.raw_output = gateway.Complete(req).text;
    ParsedTriplets parsed = ParseTripletList(result.raw_output);
    result.triplets = DeduplicateTriplets(std::move(parsed.triplets));
    result.parse_failures = parsed.failures;
  } catch (const Error &e) {
    throw Error(e.code(), "sentence " + sentence.id + ": " + e.what());
  }
  return result;
}

}  // namespace krpo
