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

#include "krpo/canonicalizer.h"

#include <unicode/uchar.h>

#include <algorithm>
#include <cctype>

#include "glog/logging.h"
#include "krpo/error.h"
#include "krpo/text.h"

namespace krpo {
namespace {

constexpr std::string_view kSuffixSeparator = " — ";

std::string FromCodePoints(const std::u32string &cps) {
  std::string out;
  for (char32_t c : cps) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

char32_t Fold(char32_t c) {
  return static_cast<char32_t>(u_foldCase(static_cast<UChar32>(c),
                                          U_FOLD_CASE_DEFAULT));
}

// Text as code points, with a flag per position marking mask tokens that
// later searches must not match into.
struct MaskedText {
  std::u32string chars;
  std::vector<bool> locked;

  std::optional<std::size_t> FindUnlocked(const std::u32string &needle) const {
    if (needle.empty() || needle.size() > chars.size()) return std::nullopt;
    for (std::size_t i = 0; i + needle.size() <= chars.size(); ++i) {
      bool match = true;
      for (std::size_t j = 0; j < needle.size() && match; ++j) {
        match = !locked[i + j] && Fold(chars[i + j]) == Fold(needle[j]);
      }
      if (match) return i;
    }
    return std::nullopt;
  }

  void Replace(std::size_t pos, std::size_t length, std::string_view token) {
    std::u32string replacement = ToCodePoints(token);
    chars.replace(pos, length, replacement);
    locked.erase(locked.begin() + pos, locked.begin() + pos + length);
    locked.insert(locked.begin() + pos, replacement.size(), true);
  }
};

bool MaskFirst(MaskedText &text, std::string_view entity, std::string_view token) {
  std::u32string needle = ToCodePoints(Trim(entity));
  std::optional<std::size_t> pos = text.FindUnlocked(needle);
  if (!pos) return false;
  text.Replace(*pos, needle.size(), token);
  return true;
}

bool IsWordChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         (static_cast<unsigned char>(c) & 0x80);
}

// Position of the first whole-word case-insensitive occurrence.
std::optional<std::size_t> FindWord(const std::string &haystack_lower,
                                    const std::string &needle_lower) {
  if (needle_lower.empty()) return std::nullopt;
  for (std::size_t pos = haystack_lower.find(needle_lower);
       pos != std::string::npos;
       pos = haystack_lower.find(needle_lower, pos + 1)) {
    bool left_ok = pos == 0 || !IsWordChar(haystack_lower[pos - 1]);
    std::size_t end = pos + needle_lower.size();
    bool right_ok = end >= haystack_lower.size() || !IsWordChar(haystack_lower[end]);
    if (left_ok && right_ok) return pos;
  }
  return std::nullopt;
}

}  // namespace

std::string MaskEntities(std::string_view restored, std::string_view subject,
                         std::string_view object) {
  CheckPrecondition(!Trim(restored).empty(), "restored text non-empty");
  MaskedText text;
  text.chars = ToCodePoints(restored);
  text.locked.assign(text.chars.size(), false);
  const bool subject_found = MaskFirst(text, subject, kSubjectMask);
  const bool object_found = MaskFirst(text, object, kObjectMask);
  std::string out = FromCodePoints(text.chars);
  if (!subject_found) out += std::string(kSuffixSeparator) + std::string(kSubjectMask);
  if (!object_found) out += std::string(kSuffixSeparator) + std::string(kObjectMask);
  return out;
}

std::vector<ScoredCandidate> ScoreCandidates(std::string_view query_schema,
                                             const SchemaMemory &memory,
                                             SchemaScorer &scorer) {
  if (memory.empty()) return {};
  std::vector<std::string> schemas;
  schemas.reserve(memory.size());
  for (const RelationSchema &entry : memory.entries()) {
    schemas.push_back(entry.schema_text);
  }
  std::vector<double> scores = scorer.Score(query_schema, schemas);
  CHECK_EQ(scores.size(), schemas.size()) << "scorer broke length contract";
  std::vector<ScoredCandidate> scored;
  scored.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scored.push_back({memory[i].relation, memory[i].schema_text, scores[i]});
  }
  return scored;
}

std::vector<ScoredCandidate> TopK(std::vector<ScoredCandidate> scored, int k) {
  CheckPrecondition(k >= 1, "K >= 1");
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredCandidate &a, const ScoredCandidate &b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.relation < b.relation;
                   });
  if (scored.size() > static_cast<std::size_t>(k)) scored.resize(k);
  return scored;
}

std::string RenderChoices(const std::vector<ScoredCandidate> &candidates) {
  std::string out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out += std::to_string(i + 1) + ". " + candidates[i].relation +
           std::string(kSuffixSeparator) + candidates[i].schema_text + "\n";
  }
  out += std::to_string(candidates.size() + 1) + ". None of the above";
  return out;
}

std::optional<std::string> ParseDecision(
    std::string_view response, const std::vector<ScoredCandidate> &candidates) {
  std::string text = Trim(response);
  std::string lowered = ToLower(text);
  for (std::string_view prefix : {"output:", "answer:", "choice:"}) {
    if (lowered.rfind(prefix, 0) == 0) {
      text = Trim(std::string_view(text).substr(prefix.size()));
      lowered = ToLower(text);
      break;
    }
  }
  if (text.empty()) return std::nullopt;

  std::size_t i = 0;
  if (text[i] == '(' || text[i] == '[') ++i;
  std::size_t digits_begin = i;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i > digits_begin && (i == text.size() || !IsWordChar(text[i]))) {
    std::size_t choice = std::stoul(text.substr(digits_begin, i - digits_begin));
    if (choice >= 1 && choice <= candidates.size()) {
      return candidates[choice - 1].relation;
    }
    if (choice == candidates.size() + 1) return std::nullopt;
  }

  if (lowered.find("none of the above") != std::string::npos ||
      lowered == "none" || lowered == "none.") {
    return std::nullopt;
  }

  std::optional<std::size_t> best_pos;
  std::optional<std::string> best;
  for (const ScoredCandidate &candidate : candidates) {
    std::optional<std::size_t> pos = FindWord(lowered, ToLower(candidate.relation));
    if (!pos) continue;
    if (!best_pos || *pos < *best_pos ||
        (*pos == *best_pos && candidate.relation.size() > best->size())) {
      best_pos = pos;
      best = candidate.relation;
    }
  }
  return best;
}

LlmRelationDecider::LlmRelationDecider(LlmGateway &gateway,
                                       const PromptAssets &assets)
    : gateway_(gateway), assets_(assets) {}

std::optional<std::string> LlmRelationDecider::Decide(
    const SentenceRecord &sentence, const Triplet &triplet,
    const std::string &query_schema,
    const std::vector<ScoredCandidate> &candidates) {
  if (candidates.empty()) return std::nullopt;
  ChatRequest req;
  req.user_text = RenderTemplate(assets_.rc_decision_template,
                                 {{"Text", sentence.text},
                                  {"Triplet", RenderTriplet(triplet)},
                                  {"QueryRelation", triplet.relation},
                                  {"QuerySchema", query_schema},
                                  {"Choices", RenderChoices(candidates)}});
  req.role = CallRole::kRcDecide;
  try {
    return ParseDecision(gateway_.Complete(req).text, candidates);
  } catch (const Error &e) {
    LOG(WARNING) << "canonicalization decision failed, keeping '"
                 << triplet.relation << "': " << e.what();
    return std::nullopt;
  }
}

Canonicalizer::Canonicalizer(SchemaMemory &memory, SchemaScorer &scorer,
                             RelationDecider &decider, int top_k)
    : memory_(memory), scorer_(scorer), decider_(decider), top_k_(top_k) {
  CheckPrecondition(top_k_ >= 1, "K >= 1");
}

CanonicalTriplet Canonicalizer::Canonicalize(const SentenceRecord &sentence,
                                             const Triplet &triplet,
                                             const std::string &restored) {
  const std::string query_schema =
      MaskEntities(restored, triplet.subject, triplet.object);

  std::lock_guard<std::mutex> lock(mu_);
  std::vector<ScoredCandidate> candidates =
      TopK(ScoreCandidates(query_schema, memory_, scorer_), top_k_);
  std::optional<std::string> decision;
  if (!candidates.empty()) {
    decision = decider_.Decide(sentence, triplet, query_schema, candidates);
  }

  CanonicalTriplet out{triplet.subject, triplet.relation, triplet.object,
                       triplet.relation, sentence.id};
  std::optional<std::size_t> index;
  if (decision) index = memory_.Find(*decision);
  if (!index) {
    // A "none" decision for a name the memory already holds reuses that
    // entry; names stay unique.
    index = memory_.Find(triplet.relation);
    if (!index) {
      memory_.Append({triplet.relation, query_schema, sentence.id, 1});
      return out;
    }
  }
  memory_.IncrementUse(*index);
  out.relation = memory_[*index].relation;
  return out;
}

}  // namespace krpo
