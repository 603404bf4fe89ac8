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

// Command-line driver: optimize, extract, eval, run, record-fixtures.

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <glog/logging.h>

#include "CLI11.hpp"
#include "krpo/config.h"
#include "krpo/dataset.h"
#include "krpo/error.h"
#include "krpo/file_util.h"
#include "krpo/pipeline.h"
#include "krpo/text.h"

namespace {

namespace fs = std::filesystem;

// Flag values; unset flags leave the config file or default in place.
struct Flags {
  std::string config;
  std::optional<std::string> dataset, out, scorer, scorer_endpoint, replay,
      replay_dir, seed_relations, prompts_dir, initial_prompt;
  std::optional<int> batch_size, top_k, epochs, parallelism;
  std::optional<std::size_t> context_budget;
  bool guarded_updates = false;
  bool eval_during_optimize = false;
  bool no_scorer_fallback = false;

  std::string prompt;  // extract
  std::string kg;      // eval
};

void AddCommonFlags(CLI::App *app, Flags *f) {
  app->add_option("--config", f->config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--dataset", f->dataset, "JSONL dataset");
  app->add_option("--out", f->out, "output directory");
  app->add_option("--batch-size", f->batch_size, "samples per prompt update (B)");
  app->add_option("--top-k", f->top_k, "candidate relations shown to the decider (K)");
  app->add_option("--epochs", f->epochs, "optimization passes over the dataset");
  app->add_option("--scorer", f->scorer, "schema scorer")
      ->check(CLI::IsMember({"remote", "lexical"}));
  app->add_option("--scorer-endpoint", f->scorer_endpoint, "remote scorer base URL");
  app->add_flag("--no-scorer-fallback", f->no_scorer_fallback,
                "fail instead of falling back to the lexical scorer");
  app->add_option("--replay", f->replay, "LLM replay mode")
      ->check(CLI::IsMember({"record", "replay", "off"}));
  app->add_option("--replay-dir", f->replay_dir, "replay store directory");
  app->add_option("--seed-relations", f->seed_relations,
                  "seed relation file (relation<TAB>schema per line)");
  app->add_option("--context-budget", f->context_budget,
                  "character budget of the prompt-update context");
  app->add_option("--parallelism", f->parallelism, "concurrent samples");
  app->add_flag("--guarded-updates", f->guarded_updates,
                "revert a prompt update when the next batch scores lower");
  app->add_flag("--eval-during-optimize", f->eval_during_optimize,
                "score Phase 1 extractions against gold");
  app->add_option("--prompts-dir", f->prompts_dir, "override prompt templates");
  app->add_option("--initial-prompt", f->initial_prompt,
                  "override the initial extraction prompt");
}

krpo::PipelineConfig BuildConfig(const Flags &f) {
  krpo::PipelineConfig c =
      f.config.empty() ? krpo::PipelineConfig() : krpo::LoadConfigFile(f.config);
  if (f.dataset) c.dataset = *f.dataset;
  if (f.out) c.out_dir = *f.out;
  if (f.batch_size) c.batch_size = *f.batch_size;
  if (f.top_k) c.top_k = *f.top_k;
  if (f.epochs) c.epochs = *f.epochs;
  if (f.context_budget) c.context_budget = *f.context_budget;
  if (f.parallelism) c.parallelism = *f.parallelism;
  if (f.scorer) c.scorer = krpo::ParseScorerBackend(*f.scorer);
  if (f.scorer_endpoint) c.scorer_endpoint = *f.scorer_endpoint;
  if (f.no_scorer_fallback) c.scorer_fallback = false;
  if (f.replay) c.replay = krpo::ParseReplayMode(*f.replay);
  if (f.replay_dir) c.replay_dir = *f.replay_dir;
  if (f.seed_relations) c.seed_relations = *f.seed_relations;
  if (f.prompts_dir) c.prompts_dir = *f.prompts_dir;
  if (f.initial_prompt) c.initial_prompt = *f.initial_prompt;
  if (f.guarded_updates) c.guarded_updates = true;
  if (f.eval_during_optimize) c.eval_during_optimize = true;
  if (c.dataset.empty()) {
    throw krpo::Error(krpo::ErrorCode::kInvalidArgument, "--dataset is required");
  }
  c.Validate();
  return c;
}

std::shared_ptr<krpo::ChatTransport> MakeTransport(const krpo::PipelineConfig &c) {
  if (c.replay == krpo::ReplayMode::kReplay) return nullptr;
  auto options = krpo::HttpChatTransport::OptionsFromEnvironment();
  if (!options) {
    LOG(WARNING) << "KRPO_LLM_ENDPOINT is unset; live LLM calls will fail";
    return nullptr;
  }
  return std::make_shared<krpo::HttpChatTransport>(*options);
}

int RunCommand(const std::string &command, const Flags &flags) {
  krpo::PipelineConfig config = BuildConfig(flags);
  if (command == "record-fixtures") config.replay = krpo::ReplayMode::kRecord;
  const std::vector<krpo::SentenceRecord> dataset = krpo::LoadDataset(config.dataset);
  LOG(INFO) << command << ": " << dataset.size() << " sentences, config "
            << config.ToJson().dump();

  if (command == "eval") {
    const fs::path kg_path =
        flags.kg.empty() ? config.out_dir / krpo::kKgFile : fs::path(flags.kg);
    krpo::Pipeline pipeline(config, nullptr);
    const krpo::MetricsReport report =
        pipeline.RunEval(dataset, krpo::KnowledgeGraph::Import(kg_path));
    std::cout << report.ToCsv();
    return 0;
  }

  krpo::Pipeline pipeline(config, MakeTransport(config));
  if (command == "optimize") {
    const krpo::Phase1Result result = pipeline.RunPhase1(dataset);
    std::cout << "prompt version " << result.prompt.version() << "\n";
    return 0;
  }
  if (command == "extract") {
    fs::path prompt_path = flags.prompt;
    if (prompt_path.empty() && fs::exists(config.out_dir / krpo::kPromptFinalFile)) {
      prompt_path = config.out_dir / krpo::kPromptFinalFile;
    }
    const krpo::PromptState prompt =
        prompt_path.empty() ? pipeline.InitialPrompt()
                            : krpo::PromptState(krpo::Trim(krpo::ReadFile(prompt_path)));
    const krpo::KnowledgeGraph kg = pipeline.RunPhase2(dataset, prompt);
    std::cout << kg.size() << " triples\n";
    return 0;
  }

  // run / record-fixtures
  const krpo::Phase1Result phase1 = pipeline.RunPhase1(dataset);
  const krpo::KnowledgeGraph kg = pipeline.RunPhase2(dataset, phase1.prompt);
  std::cout << "prompt version " << phase1.prompt.version() << ", " << kg.size()
            << " triples, " << pipeline.gateway().LiveCalls() << " live calls\n";
  if (krpo::AllHaveGold(dataset)) {
    std::cout << pipeline.RunEval(dataset, kg).ToCsv();
  } else {
    LOG(WARNING) << "dataset lacks gold triplets; evaluation skipped";
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_logtostderr = true;

  CLI::App app{"Knowledge-restoration prompt optimization for triplet extraction"};
  app.require_subcommand(1);
  Flags flags;
  struct Sub {
    const char *name;
    const char *help;
  };
  const Sub subs[] = {
      {"optimize", "Phase 1: optimize the extraction prompt"},
      {"extract", "Phase 2: extract, canonicalize and build the knowledge graph"},
      {"eval", "score kg.jsonl against the dataset's gold triplets"},
      {"run", "optimize, extract and eval"},
      {"record-fixtures", "run with live calls captured into the replay store"},
  };
  for (const Sub &s : subs) {
    CLI::App *sub = app.add_subcommand(s.name, s.help);
    AddCommonFlags(sub, &flags);
    if (std::string(s.name) == "extract") {
      sub->add_option("--prompt", flags.prompt,
                      "prompt file (default: <out>/prompt_final.txt, else initial)");
    }
    if (std::string(s.name) == "eval") {
      sub->add_option("--kg", flags.kg, "knowledge graph (default: <out>/kg.jsonl)");
    }
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return RunCommand(command, flags);
  } catch (const krpo::Error &e) {
    std::cerr << "krpo " << command << ": " << e.what() << "\n";
    return 1;
  }
}
