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

#ifndef KRPO_CONFIG_H_
#define KRPO_CONFIG_H_

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "krpo/llm_gateway.h"

namespace krpo {

enum class ScorerBackend { kLexical, kRemote };
std::string_view ScorerBackendName(ScorerBackend backend);
ScorerBackend ParseScorerBackend(std::string_view name);  // lexical|remote

struct PipelineConfig {
  std::filesystem::path dataset;
  std::filesystem::path out_dir = "out";

  int batch_size = 5;
  int top_k = 5;
  int epochs = 1;
  std::size_t context_budget = 12000;
  int parallelism = 1;

  ScorerBackend scorer = ScorerBackend::kLexical;
  std::string scorer_endpoint;
  // Remote scorer failures fall back to the lexical scorer when set.
  bool scorer_fallback = true;

  ReplayMode replay = ReplayMode::kPassthrough;
  std::filesystem::path replay_dir = "replay";

  std::optional<std::filesystem::path> seed_relations;
  std::optional<std::filesystem::path> prompts_dir;
  // Overrides the initial extraction prompt of Phase 1.
  std::optional<std::filesystem::path> initial_prompt;

  bool guarded_updates = false;
  bool eval_during_optimize = false;

  // Throws Error(kInvalidArgument) on an out-of-range field.
  void Validate() const;

  nlohmann::ordered_json ToJson() const;
};

// Overlays the keys present in doc onto config. Keys are the long flag
// names with '_' for '-'. Unknown keys and wrong types throw
// Error(kParseError). Relative paths resolve against base_dir.
void ApplyConfigJson(const nlohmann::json &doc,
                     const std::filesystem::path &base_dir,
                     PipelineConfig *config);

// Defaults overlaid with the JSON file at path.
PipelineConfig LoadConfigFile(const std::filesystem::path &path);

}  // namespace krpo

#endif  // KRPO_CONFIG_H_
