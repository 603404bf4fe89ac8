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

#ifndef KRPO_PROMPTS_H_
#define KRPO_PROMPTS_H_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace krpo {

struct PromptRevision {
  int version = 0;
  std::string text;
  int batch_index = -1;  // -1 for the initial prompt

  friend bool operator==(const PromptRevision &,
                         const PromptRevision &) = default;
};

// The optimized variable: the current extraction prompt plus every revision
// it went through. version() == history().size() - 1 always holds.
class PromptState {
 public:
  explicit PromptState(std::string initial_text);

  const std::string &text() const { return history_.back().text; }
  int version() const { return history_.back().version; }
  const std::vector<PromptRevision> &history() const { return history_; }

  // Returns a copy advanced by one version.
  PromptState WithRevision(std::string text, int batch_index) const;

  friend bool operator==(const PromptState &, const PromptState &) = default;

 private:
  std::vector<PromptRevision> history_;
};

// Template strings for every model call. Placeholders are written {Name}.
struct PromptAssets {
  std::string initial_orte_prompt;
  std::string kr_prompt;             // {Triplet}
  std::string nli_prompt;            // {Premise} {Hypothesis}
  std::string i1_template;           // {Triplets} {Metrics}
  std::string i2_template;           // {Prompt} {Sentence} {Triplets} {Feedback}
  std::string i3_template;           // {Prompt} {Context}
  std::string rc_decision_template;  // {Text} {Triplet} {QueryRelation}
                                     // {QuerySchema} {Choices}

  // The templates compiled into the library from assets/prompts.
  static PromptAssets Embedded();

  // Reads <name>.txt files from dir; files that are absent keep the
  // embedded version. The result is validated.
  static PromptAssets LoadFromDirectory(const std::filesystem::path &dir);

  // Throws Error(kInvalidArgument) unless every template's placeholder set
  // equals its documented set exactly.
  void Validate() const;
};

std::set<std::string> TemplatePlaceholders(std::string_view tmpl);

// Substitutes {Name} placeholders in one pass; substituted text is not
// rescanned. Throws Error(kInvalidArgument) for a placeholder with no value.
std::string RenderTemplate(std::string_view tmpl,
                           const std::map<std::string, std::string> &values);

}  // namespace krpo

#endif  // KRPO_PROMPTS_H_
