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

#ifndef KRPO_SCORER_H_
#define KRPO_SCORER_H_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace krpo {

// Semantic relevance between a query schema and candidate schemas. Scores
// are in [0, 1], one per candidate in candidate order, deterministic for
// fixed inputs.
class SchemaScorer {
 public:
  virtual ~SchemaScorer() = default;
  virtual std::vector<double> Score(std::string_view query,
                                    const std::vector<std::string> &candidates) = 0;
  virtual std::string_view Name() const = 0;
};

// Dice coefficient over the sets of character (code point) trigrams of the
// lowercased inputs. Empty vs empty is 1, empty vs non-empty is 0. Inputs
// shorter than three characters have no trigrams and score 1 only when
// equal.
double LexicalFallbackScore(std::string_view a, std::string_view b);

class LexicalScorer : public SchemaScorer {
 public:
  std::vector<double> Score(std::string_view query,
                            const std::vector<std::string> &candidates) override;
  std::string_view Name() const override { return "lexical"; }
};

// Client for the cross-encoder service:
//   POST <endpoint>/score {"query": str, "candidates": [str]}
//     -> {"scores": [real]}
// Throws Error(kRemoteScorerUnavailable) when the service cannot be reached
// after the retries or replies outside the contract.
class RemoteScorer : public SchemaScorer {
 public:
  struct Options {
    std::string endpoint;  // e.g. "http://localhost:8080"
    int timeout_seconds = 10;
    int retries = 2;
  };

  explicit RemoteScorer(Options options);

  std::vector<double> Score(std::string_view query,
                            const std::vector<std::string> &candidates) override;
  std::string_view Name() const override { return "remote"; }

 private:
  Options options_;
};

// Uses primary and switches to fallback for any call where the primary
// reports RemoteScorerUnavailable.
class FallbackScorer : public SchemaScorer {
 public:
  FallbackScorer(std::unique_ptr<SchemaScorer> primary,
                 std::unique_ptr<SchemaScorer> fallback);

  std::vector<double> Score(std::string_view query,
                            const std::vector<std::string> &candidates) override;
  std::string_view Name() const override { return primary_->Name(); }

 private:
  std::unique_ptr<SchemaScorer> primary_;
  std::unique_ptr<SchemaScorer> fallback_;
};

}  // namespace krpo

#endif  // KRPO_SCORER_H_
