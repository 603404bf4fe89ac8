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

#include "krpo/prompts.h"

#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

#include "krpo/error.h"

namespace krpo {
namespace internal {
extern const std::pair<std::string_view, std::string_view> kEmbeddedPrompts[];
extern const int kNumEmbeddedPrompts;
}  // namespace internal

namespace {

struct TemplateSpec {
  const char *file;
  std::string PromptAssets::*field;
  std::set<std::string> placeholders;
};

const std::vector<TemplateSpec> &Specs() {
  static const std::vector<TemplateSpec> specs = {
      {"initial_orte", &PromptAssets::initial_orte_prompt, {}},
      {"knowledge_restoration", &PromptAssets::kr_prompt, {"Triplet"}},
      {"nli", &PromptAssets::nli_prompt, {"Premise", "Hypothesis"}},
      {"eval_feedback", &PromptAssets::i1_template, {"Triplets", "Metrics"}},
      {"prompt_guidance", &PromptAssets::i2_template,
       {"Prompt", "Sentence", "Triplets", "Feedback"}},
      {"prompt_update", &PromptAssets::i3_template, {"Prompt", "Context"}},
      {"rc_decision", &PromptAssets::rc_decision_template,
       {"Text", "Triplet", "QueryRelation", "QuerySchema", "Choices"}},
  };
  return specs;
}

// Template files end with a newline; the prompt itself does not.
std::string StripTrailingNewlines(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

bool IsPlaceholderName(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) {
    return false;
  }
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

// Calls fn(begin, end, name) for each {Name} occurrence.
template <typename Fn>
void ForEachPlaceholder(std::string_view tmpl, Fn fn) {
  std::size_t pos = 0;
  while ((pos = tmpl.find('{', pos)) != std::string_view::npos) {
    std::size_t close = tmpl.find('}', pos + 1);
    if (close == std::string_view::npos) return;
    std::string_view name = tmpl.substr(pos + 1, close - pos - 1);
    if (IsPlaceholderName(name)) {
      fn(pos, close + 1, name);
      pos = close + 1;
    } else {
      ++pos;
    }
  }
}

}  // namespace

PromptState::PromptState(std::string initial_text) {
  history_.push_back({0, std::move(initial_text), -1});
}

PromptState PromptState::WithRevision(std::string text, int batch_index) const {
  PromptState next = *this;
  next.history_.push_back({version() + 1, std::move(text), batch_index});
  return next;
}

PromptAssets PromptAssets::Embedded() {
  PromptAssets assets;
  for (const TemplateSpec &spec : Specs()) {
    for (int i = 0; i < internal::kNumEmbeddedPrompts; ++i) {
      if (internal::kEmbeddedPrompts[i].first == spec.file) {
        assets.*spec.field =
            StripTrailingNewlines(internal::kEmbeddedPrompts[i].second);
      }
    }
  }
  assets.Validate();
  return assets;
}

PromptAssets PromptAssets::LoadFromDirectory(const std::filesystem::path &dir) {
  PromptAssets assets = Embedded();
  for (const TemplateSpec &spec : Specs()) {
    std::filesystem::path path = dir / (std::string(spec.file) + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) continue;
    std::ostringstream body;
    body << in.rdbuf();
    assets.*spec.field = StripTrailingNewlines(body.str());
  }
  assets.Validate();
  return assets;
}

void PromptAssets::Validate() const {
  for (const TemplateSpec &spec : Specs()) {
    const std::string &tmpl = this->*spec.field;
    if (tmpl.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("prompt template '") + spec.file + "' is empty");
    }
    std::set<std::string> found = TemplatePlaceholders(tmpl);
    if (found != spec.placeholders) {
      std::string got;
      for (const std::string &name : found) got += " {" + name + "}";
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("prompt template '") + spec.file +
                      "' has placeholders:" + (got.empty() ? " none" : got));
    }
  }
}

std::set<std::string> TemplatePlaceholders(std::string_view tmpl) {
  std::set<std::string> names;
  ForEachPlaceholder(tmpl, [&](std::size_t, std::size_t, std::string_view name) {
    names.emplace(name);
  });
  return names;
}

std::string RenderTemplate(std::string_view tmpl,
                           const std::map<std::string, std::string> &values) {
  std::string out;
  std::size_t copied = 0;
  ForEachPlaceholder(tmpl, [&](std::size_t begin, std::size_t end,
                               std::string_view name) {
    auto it = values.find(std::string(name));
    if (it == values.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "no value for placeholder {" + std::string(name) + "}");
    }
    out.append(tmpl.substr(copied, begin - copied));
    out += it->second;
    copied = end;
  });
  out.append(tmpl.substr(copied));
  return out;
}

}  // namespace krpo
