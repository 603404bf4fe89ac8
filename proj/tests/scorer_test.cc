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

#include <atomic>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "json.hpp"
#include "krpo/error.h"
#include "testing/local_server.h"

namespace krpo {
namespace {

// Independent trigram Dice over lowercase ASCII.
double DiceOracle(std::string a, std::string b) {
  for (char &c : a) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (char &c : b) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::set<std::string> ta, tb;
  for (std::size_t i = 0; i + 3 <= a.size(); ++i) ta.insert(a.substr(i, 3));
  for (std::size_t i = 0; i + 3 <= b.size(); ++i) tb.insert(b.substr(i, 3));
  if (ta.empty() || tb.empty()) return a == b ? 1.0 : 0.0;
  std::size_t common = 0;
  for (const std::string &t : ta) common += tb.count(t);
  return 2.0 * static_cast<double>(common) / static_cast<double>(ta.size() + tb.size());
}

TEST(LexicalFallbackScoreTest, IdenticalStringsScoreOne) {
  for (const char *s : {"a", "ab", "The [SUBJECT] was built in [OBJECT]."}) {
    EXPECT_EQ(LexicalFallbackScore(s, s), 1.0) << s;
  }
}

TEST(LexicalFallbackScoreTest, DisjointTrigrams) { EXPECT_EQ(LexicalFallbackScore("abc", "xyz"), 0.0); }

TEST(LexicalFallbackScoreTest, EmptyInputs) {
  EXPECT_EQ(LexicalFallbackScore("", ""), 1.0);
  EXPECT_EQ(LexicalFallbackScore("", "abc"), 0.0);
  EXPECT_EQ(LexicalFallbackScore("abc", ""), 0.0);
}

TEST(LexicalFallbackScoreTest, NightNacht) {
  // {nig, igh, ght} and {nac, ach, cht} share nothing.
  EXPECT_EQ(LexicalFallbackScore("night", "nacht"), DiceOracle("night", "nacht"));
  EXPECT_EQ(LexicalFallbackScore("night", "nacht"), 0.0);
  // {nig, igh, ght} and {nig, igh, ghs}: 2 * 2 / 6.
  EXPECT_DOUBLE_EQ(LexicalFallbackScore("night", "nighs"), 2.0 / 3.0);
}

TEST(LexicalFallbackScoreTest, SchemaPairMatchesOracle) {
  const std::string built = "The [SUBJECT] was built in [OBJECT].";
  const std::string assembled = "The [SUBJECT] was assembled in [OBJECT].";
  EXPECT_DOUBLE_EQ(LexicalFallbackScore(built, assembled), DiceOracle(built, assembled));
  EXPECT_GT(LexicalFallbackScore(built, assembled), 0.5);
  EXPECT_LT(LexicalFallbackScore(built, assembled), 1.0);
}

TEST(LexicalFallbackScoreTest, CaseInsensitive) {
  EXPECT_EQ(LexicalFallbackScore("BuildDate", "builddate"), 1.0);
}

TEST(LexicalFallbackScoreTest, RandomAsciiMatchesOracleAndIsSymmetric) {
  std::mt19937 rng(9);
  const std::string alphabet = "abcAB [].";
  for (int trial = 0; trial < 1000; ++trial) {
    std::string a, b;
    for (int i = 0, n = static_cast<int>(rng() % 9); i < n; ++i) a += alphabet[rng() % alphabet.size()];
    for (int i = 0, n = static_cast<int>(rng() % 9); i < n; ++i) b += alphabet[rng() % alphabet.size()];
    const double s = LexicalFallbackScore(a, b);
    EXPECT_DOUBLE_EQ(s, DiceOracle(a, b)) << "'" << a << "' '" << b << "'";
    EXPECT_EQ(s, LexicalFallbackScore(b, a));
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(LexicalFallbackScoreTest, TrigramsAreCodePoints) {
  // Three code points, one trigram each: shared.
  EXPECT_EQ(LexicalFallbackScore("ÉTÉ", "été"), 1.0);
  EXPECT_EQ(LexicalFallbackScore("été", "ete"), 0.0);
}

TEST(LexicalScorerTest, OneScorePerCandidateInOrder) {
  LexicalScorer scorer;
  const std::vector<double> scores = scorer.Score("abcd", {"abcd", "xyz", "abcx"});
  ASSERT_EQ(scores.size(), 3u);
  EXPECT_EQ(scores[0], 1.0);
  EXPECT_EQ(scores[1], 0.0);
  EXPECT_DOUBLE_EQ(scores[2], 0.5);
}

TEST(RemoteScorerTest, WireContract) {
  testing::LocalServer server;
  nlohmann::json seen;
  server.server().Post("/score", [&](const httplib::Request &req, httplib::Response &res) {
    seen = nlohmann::json::parse(req.body);
    res.set_content(R"({"scores":[0.25,1.0]})", "application/json");
  });
  server.Start();
  RemoteScorer scorer({server.base_url(), 2, 0});
  EXPECT_EQ(scorer.Score("q", {"a", "b"}), (std::vector<double>{0.25, 1.0}));
  EXPECT_EQ(seen["query"], "q");
  EXPECT_EQ(seen["candidates"], (nlohmann::json{"a", "b"}));
}

TEST(RemoteScorerTest, EndpointPathPrefix) {
  testing::LocalServer server;
  server.server().Post("/v2/score", [&](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"({"scores":[0.5]})", "application/json");
  });
  server.Start();
  RemoteScorer scorer({server.base_url() + "/v2", 2, 0});
  EXPECT_EQ(scorer.Score("q", {"a"}), (std::vector<double>{0.5}));
}

TEST(RemoteScorerTest, EmptyCandidatesMakeNoCall) {
  testing::LocalServer server;
  std::atomic<int> hits{0};
  server.server().Post("/score", [&](const httplib::Request &, httplib::Response &res) {
    ++hits;
    res.set_content(R"({"scores":[]})", "application/json");
  });
  server.Start();
  RemoteScorer scorer({server.base_url(), 2, 2});
  EXPECT_TRUE(scorer.Score("q", {}).empty());
  EXPECT_EQ(hits.load(), 0);
}

ErrorCode ScoreError(RemoteScorer &scorer) {
  try {
    scorer.Score("q", {"a", "b"});
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kInvalidArgument;
}

TEST(RemoteScorerTest, RetriesServerErrors) {
  testing::LocalServer server;
  std::atomic<int> hits{0};
  server.server().Post("/score", [&](const httplib::Request &, httplib::Response &res) {
    if (hits++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"scores":[0.1,0.2]})", "application/json");
  });
  server.Start();
  RemoteScorer scorer({server.base_url(), 2, 2});
  EXPECT_EQ(scorer.Score("q", {"a", "b"}), (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(hits.load(), 2);
}

TEST(RemoteScorerTest, ClientErrorIsNotRetried) {
  testing::LocalServer server;
  std::atomic<int> hits{0};
  server.server().Post("/score", [&](const httplib::Request &, httplib::Response &res) {
    ++hits;
    res.status = 400;
  });
  server.Start();
  RemoteScorer scorer({server.base_url(), 2, 2});
  EXPECT_EQ(ScoreError(scorer), ErrorCode::kRemoteScorerUnavailable);
  EXPECT_EQ(hits.load(), 1);
}

TEST(RemoteScorerTest, RetriesThenUnavailable) {
  testing::LocalServer server;
  std::atomic<int> hits{0};
  server.server().Post("/score", [&](const httplib::Request &, httplib::Response &res) {
    ++hits;
    res.status = 500;
  });
  server.Start();
  RemoteScorer scorer({server.base_url(), 2, 2});
  EXPECT_EQ(ScoreError(scorer), ErrorCode::kRemoteScorerUnavailable);
  EXPECT_EQ(hits.load(), 3);
}

TEST(RemoteScorerTest, LengthMismatchAndRangeViolations) {
  testing::LocalServer server;
  std::string body = R"({"scores":[0.5]})";
  server.server().Post("/score", [&](const httplib::Request &, httplib::Response &res) {
    res.set_content(body, "application/json");
  });
  server.Start();
  RemoteScorer scorer({server.base_url(), 2, 0});
  EXPECT_EQ(ScoreError(scorer), ErrorCode::kRemoteScorerUnavailable);
  body = R"({"scores":[0.5, 1.5]})";
  EXPECT_EQ(ScoreError(scorer), ErrorCode::kRemoteScorerUnavailable);
  body = R"({"scores":[0.5, "x"]})";
  EXPECT_EQ(ScoreError(scorer), ErrorCode::kRemoteScorerUnavailable);
}

TEST(RemoteScorerTest, UnreachableEndpoint) {
  int port = 0;
  {
    testing::LocalServer closed;
    closed.Start();
    port = std::stoi(closed.base_url().substr(closed.base_url().rfind(':') + 1));
  }
  RemoteScorer scorer({"http://127.0.0.1:" + std::to_string(port), 1, 1});
  EXPECT_EQ(ScoreError(scorer), ErrorCode::kRemoteScorerUnavailable);
}

TEST(FallbackScorerTest, FallsBackWhenRemoteIsDown) {
  int port = 0;
  {
    testing::LocalServer closed;
    closed.Start();
    port = std::stoi(closed.base_url().substr(closed.base_url().rfind(':') + 1));
  }
  FallbackScorer scorer(
      std::make_unique<RemoteScorer>(RemoteScorer::Options{"http://127.0.0.1:" + std::to_string(port), 1, 0}),
      std::make_unique<LexicalScorer>());
  EXPECT_EQ(scorer.Score("abc", {"abc", "xyz"}), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(scorer.Name(), "remote");
}

}  // namespace
}  // namespace krpo
