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

#include "krpo/scorer.h"

#include <cmath>
#include <set>

#include "glog/logging.h"
#include "httplib.h"
#include "http_util.h"
#include "json.hpp"
#include "krpo/error.h"
#include "krpo/text.h"

namespace krpo {
namespace {

std::set<std::u32string> Trigrams(const std::u32string &s) {
  std::set<std::u32string> grams;
  for (std::size_t i = 0; i + 3 <= s.size(); ++i) grams.insert(s.substr(i, 3));
  return grams;
}

}  // namespace

double LexicalFallbackScore(std::string_view a, std::string_view b) {
  const std::u32string lhs = ToCodePoints(ToLower(a));
  const std::u32string rhs = ToCodePoints(ToLower(b));
  if (lhs.empty() && rhs.empty()) return 1.0;
  if (lhs.empty() || rhs.empty()) return 0.0;
  const std::set<std::u32string> x = Trigrams(lhs);
  const std::set<std::u32string> y = Trigrams(rhs);
  if (x.empty() || y.empty()) return lhs == rhs ? 1.0 : 0.0;
  std::size_t shared = 0;
  for (const std::u32string &gram : x) shared += y.count(gram);
  return 2.0 * static_cast<double>(shared) /
         static_cast<double>(x.size() + y.size());
}

std::vector<double> LexicalScorer::Score(
    std::string_view query, const std::vector<std::string> &candidates) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const std::string &candidate : candidates) {
    scores.push_back(LexicalFallbackScore(query, candidate));
  }
  return scores;
}

RemoteScorer::RemoteScorer(Options options) : options_(std::move(options)) {}

std::vector<double> RemoteScorer::Score(
    std::string_view query, const std::vector<std::string> &candidates) {
  if (candidates.empty()) return {};
  internal::SplitUrl url = internal::SplitHttpUrl(options_.endpoint);
  std::string path = url.path;
  if (path.empty() || path.back() != '/') path.push_back('/');
  path += "score";

  const nlohmann::json body = {{"query", query}, {"candidates", candidates}};
  const std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);
    httplib::Result result = client.Post(path, payload, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status != 200) {
      last_error = "HTTP " + std::to_string(result->status);
      if (result->status < 500) break;
      continue;
    }
    nlohmann::json reply = nlohmann::json::parse(result->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("scores") ||
        !reply["scores"].is_array() ||
        reply["scores"].size() != candidates.size()) {
      last_error = "reply violates the /score contract";
      break;
    }
    std::vector<double> scores;
    for (const nlohmann::json &value : reply["scores"]) {
      double score = value.is_number() ? value.get<double>() : NAN;
      if (!(score >= 0.0 && score <= 1.0)) {
        throw Error(ErrorCode::kRemoteScorerUnavailable,
                    options_.endpoint + ": score outside [0,1]");
      }
      scores.push_back(score);
    }
    return scores;
  }
  throw Error(ErrorCode::kRemoteScorerUnavailable,
              options_.endpoint + ": " + last_error);
}

FallbackScorer::FallbackScorer(std::unique_ptr<SchemaScorer> primary,
                               std::unique_ptr<SchemaScorer> fallback)
    : primary_(std::move(primary)), fallback_(std::move(fallback)) {}

std::vector<double> FallbackScorer::Score(
    std::string_view query, const std::vector<std::string> &candidates) {
  try {
    return primary_->Score(query, candidates);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::kRemoteScorerUnavailable) throw;
    LOG(WARNING) << "scorer " << primary_->Name() << " unavailable, using "
                 << fallback_->Name() << ": " << e.what();
    return fallback_->Score(query, candidates);
  }
}

}  // namespace krpo
