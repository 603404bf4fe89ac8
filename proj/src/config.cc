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

#include "krpo/config.h"

#include <functional>
#include <map>

#include "krpo/error.h"
#include "krpo/file_util.h"

namespace krpo {
namespace {

std::filesystem::path Resolve(const std::filesystem::path &base,
                              const std::string &value) {
  std::filesystem::path p(value);
  if (p.is_relative() && !p.empty() && !base.empty()) return base / p;
  return p;
}

template <typename T>
T Get(const nlohmann::json &value, const std::string &key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception &) {
    throw Error(ErrorCode::kParseError, "config key \"" + key + "\" has the wrong type");
  }
}

}  // namespace

std::string_view ScorerBackendName(ScorerBackend backend) {
  return backend == ScorerBackend::kRemote ? "remote" : "lexical";
}

ScorerBackend ParseScorerBackend(std::string_view name) {
  if (name == "lexical") return ScorerBackend::kLexical;
  if (name == "remote") return ScorerBackend::kRemote;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown scorer \"" + std::string(name) + "\" (lexical|remote)");
}

void PipelineConfig::Validate() const {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(batch_size >= 1, "batch_size must be >= 1");
  require(top_k >= 1, "top_k must be >= 1");
  require(epochs >= 1, "epochs must be >= 1");
  require(parallelism >= 1, "parallelism must be >= 1");
  require(context_budget >= 1, "context_budget must be >= 1");
  require(scorer != ScorerBackend::kRemote || !scorer_endpoint.empty(),
          "scorer \"remote\" needs scorer_endpoint");
}

nlohmann::ordered_json PipelineConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["dataset"] = dataset.string();
  j["out"] = out_dir.string();
  j["batch_size"] = batch_size;
  j["top_k"] = top_k;
  j["epochs"] = epochs;
  j["context_budget"] = context_budget;
  j["parallelism"] = parallelism;
  j["scorer"] = ScorerBackendName(scorer);
  j["scorer_endpoint"] = scorer_endpoint;
  j["scorer_fallback"] = scorer_fallback;
  j["replay"] = ReplayModeName(replay);
  j["replay_dir"] = replay_dir.string();
  j["seed_relations"] = seed_relations ? seed_relations->string() : "";
  j["prompts_dir"] = prompts_dir ? prompts_dir->string() : "";
  j["initial_prompt"] = initial_prompt ? initial_prompt->string() : "";
  j["guarded_updates"] = guarded_updates;
  j["eval_during_optimize"] = eval_during_optimize;
  return j;
}

void ApplyConfigJson(const nlohmann::json &doc,
                     const std::filesystem::path &base_dir,
                     PipelineConfig *config) {
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "config is not a JSON object");
  using Setter = std::function<void(const nlohmann::json &, const std::string &)>;
  PipelineConfig &c = *config;
  auto path_opt = [&](std::optional<std::filesystem::path> &field) -> Setter {
    return [&](const nlohmann::json &v, const std::string &k) {
      const std::string s = Get<std::string>(v, k);
      if (s.empty()) {
        field.reset();
      } else {
        field = Resolve(base_dir, s);
      }
    };
  };
  const std::map<std::string, Setter> setters = {
      {"dataset", [&](auto &v, auto &k) { c.dataset = Resolve(base_dir, Get<std::string>(v, k)); }},
      {"out", [&](auto &v, auto &k) { c.out_dir = Resolve(base_dir, Get<std::string>(v, k)); }},
      {"batch_size", [&](auto &v, auto &k) { c.batch_size = Get<int>(v, k); }},
      {"top_k", [&](auto &v, auto &k) { c.top_k = Get<int>(v, k); }},
      {"epochs", [&](auto &v, auto &k) { c.epochs = Get<int>(v, k); }},
      {"context_budget", [&](auto &v, auto &k) { c.context_budget = Get<std::size_t>(v, k); }},
      {"parallelism", [&](auto &v, auto &k) { c.parallelism = Get<int>(v, k); }},
      {"scorer", [&](auto &v, auto &k) { c.scorer = ParseScorerBackend(Get<std::string>(v, k)); }},
      {"scorer_endpoint", [&](auto &v, auto &k) { c.scorer_endpoint = Get<std::string>(v, k); }},
      {"scorer_fallback", [&](auto &v, auto &k) { c.scorer_fallback = Get<bool>(v, k); }},
      {"replay", [&](auto &v, auto &k) { c.replay = ParseReplayMode(Get<std::string>(v, k)); }},
      {"replay_dir", [&](auto &v, auto &k) { c.replay_dir = Resolve(base_dir, Get<std::string>(v, k)); }},
      {"seed_relations", path_opt(c.seed_relations)},
      {"prompts_dir", path_opt(c.prompts_dir)},
      {"initial_prompt", path_opt(c.initial_prompt)},
      {"guarded_updates", [&](auto &v, auto &k) { c.guarded_updates = Get<bool>(v, k); }},
      {"eval_during_optimize", [&](auto &v, auto &k) { c.eval_during_optimize = Get<bool>(v, k); }},
  };
  for (const auto &[key, value] : doc.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) {
      throw Error(ErrorCode::kParseError, "unknown config key \"" + key + "\"");
    }
    it->second(value, key);
  }
}

PipelineConfig LoadConfigFile(const std::filesystem::path &path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  PipelineConfig config;
  ApplyConfigJson(doc, path.parent_path(), &config);
  return config;
}

}  // namespace krpo
