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

#include "krpo/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "krpo/error.h"
#include "testing/metric_oracle.h"

namespace krpo {
namespace {

using testing::ForEachAssignment;
using testing::kVocab;
using testing::OracleElement;
using testing::OracleTotal;
using testing::OracleTriple;
using testing::RandomField;
using testing::RandomTriplets;

// ---- Element and triple scores ----

TEST(ElementMatchScoreTest, Examples) {
  EXPECT_EQ(ElementMatchScore("Pontiac Rageous", "pontiac rageous", MatchMode::kStrict), 1.0);
  EXPECT_EQ(ElementMatchScore("assembly line", "assembly", MatchMode::kPartial), 0.5);
  EXPECT_EQ(ElementMatchScore("assembly line", "assembly", MatchMode::kExact), 0.0);
  EXPECT_EQ(ElementMatchScore("Detroit.", "detroit", MatchMode::kExact), 1.0);
  EXPECT_EQ(ElementMatchScore("productionYear", "production", MatchMode::kPartial), 0.5);
  EXPECT_EQ(ElementMatchScore("abc", "xyz", MatchMode::kPartial), 0.0);
}

TEST(ElementMatchScoreTest, MatchesOracle) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::string p = RandomField(rng), g = RandomField(rng);
    for (MatchMode mode : kAllMatchModes) {
      EXPECT_EQ(ElementMatchScore(p, g, mode), OracleElement(p, g, mode)) << p << " | " << g;
    }
  }
}

TEST(TripleMatchScoreTest, SwapOnlyOutsideStrict) {
  const Triplet p{"Michigan", "state", "Detroit"}, g{"Detroit", "state", "Michigan"};
  EXPECT_DOUBLE_EQ(TripleMatchScore(p, g, MatchMode::kStrict), 1.0 / 3.0);
  EXPECT_EQ(TripleMatchScore(p, g, MatchMode::kExact), 1.0);
  EXPECT_EQ(TripleMatchScore(p, g, MatchMode::kPartial), 1.0);
}

// ---- Alignment ----

TEST(AlignTripletsTest, Identity) {
  const std::vector<Triplet> t = {{"a", "b", "c"}, {"d", "e", "f"}, {"a", "b", "x"}};
  for (MatchMode mode : kAllMatchModes) {
    const Alignment a = AlignTriplets(t, t, mode);
    EXPECT_EQ(a.total, 3.0);
    EXPECT_EQ(a.pairs.size(), 3u);
  }
}

TEST(AlignTripletsTest, TwoOfThree) {
  const std::vector<Triplet> p = {{"a", "b", "c"}}, g = {{"a", "b", "x"}};
  EXPECT_DOUBLE_EQ(AlignTriplets(p, g, MatchMode::kStrict).total, 2.0 / 3.0);
}

TEST(AlignTripletsTest, ZeroScorePairsStayUnmatched) {
  const std::vector<Triplet> p = {{"a", "b", "c"}, {"q", "q", "q"}}, g = {{"a", "b", "c"}, {"z", "z", "z"}};
  const Alignment a = AlignTriplets(p, g, MatchMode::kStrict);
  EXPECT_EQ(a.pairs, (std::vector<std::pair<int, int>>{{0, 0}}));
  EXPECT_EQ(a.total, 1.0);
}

TEST(AlignTripletsTest, OneToOne) {
  const std::vector<Triplet> p = {{"a", "b", "c"}, {"a", "b", "c"}}, g = {{"a", "b", "c"}};
  const Alignment a = AlignTriplets(p, g, MatchMode::kExact);
  EXPECT_EQ(a.total, 1.0);
  EXPECT_EQ(a.pairs.size(), 1u);
}

TEST(AlignTripletsTest, ExhaustiveRegimeMatchesPermutationOracle) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto pred = RandomTriplets(rng, 5), gold = RandomTriplets(rng, 5);
    for (MatchMode mode : kAllMatchModes) {
      const Alignment a = AlignTriplets(pred, gold, mode);
      EXPECT_NEAR(a.total, OracleTotal(pred, gold, mode), 1e-9);
      double sum = 0.0;
      std::set<int> used_p, used_g;
      for (std::size_t k = 0; k < a.pairs.size(); ++k) {
        EXPECT_TRUE(used_p.insert(a.pairs[k].first).second);
        EXPECT_TRUE(used_g.insert(a.pairs[k].second).second);
        EXPECT_GT(a.pair_scores[k], 0.0);
        EXPECT_NEAR(a.pair_scores[k], OracleTriple(pred[a.pairs[k].first], gold[a.pairs[k].second], mode), 1e-12);
        sum += a.pair_scores[k];
      }
      EXPECT_NEAR(sum, a.total, 1e-9);
    }
  }
}

TEST(AlignTripletsTest, EightByEightStaysExhaustive) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<Triplet> pred(8), gold(8);
    for (Triplet &t : pred) t = {RandomField(rng), RandomField(rng), RandomField(rng)};
    for (Triplet &t : gold) t = {RandomField(rng), RandomField(rng), RandomField(rng)};
    EXPECT_NEAR(AlignTriplets(pred, gold, MatchMode::kPartial).total, OracleTotal(pred, gold, MatchMode::kPartial), 1e-9);
  }
}

// Greedy oracle: highest pair score first, ties by (pred, gold) index.
double GreedyOracle(const std::vector<Triplet> &pred, const std::vector<Triplet> &gold, MatchMode mode) {
  struct Cand {
    double score;
    int i, j;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < static_cast<int>(pred.size()); ++i) {
    for (int j = 0; j < static_cast<int>(gold.size()); ++j) {
      cands.push_back({OracleTriple(pred[i], gold[j], mode), i, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand &a, const Cand &b) {
    if (std::abs(a.score - b.score) > 1e-12) return a.score > b.score;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  std::set<int> used_p, used_g;
  double total = 0.0;
  for (const Cand &c : cands) {
    if (c.score <= 0.0 || used_p.count(c.i) || used_g.count(c.j)) continue;
    used_p.insert(c.i);
    used_g.insert(c.j);
    total += c.score;
  }
  return total;
}

TEST(AlignTripletsTest, GreedyAboveEight) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Triplet> pred(9 + rng() % 4), gold(9 + rng() % 4);
    for (Triplet &t : pred) t = {RandomField(rng), RandomField(rng), RandomField(rng)};
    for (Triplet &t : gold) t = {RandomField(rng), RandomField(rng), RandomField(rng)};
    for (MatchMode mode : kAllMatchModes) {
      EXPECT_NEAR(AlignTriplets(pred, gold, mode).total, GreedyOracle(pred, gold, mode), 1e-9);
    }
  }
}

// ---- P/R/F1 ----

TEST(ComputePrfTest, Examples) {
  const std::vector<Triplet> three = {{"a", "b", "c"}, {"d", "e", "f"}, {"g", "h", "i"}};
  const Prf perfect = ComputePrf(three, three, MatchMode::kStrict);
  EXPECT_EQ(perfect.precision, 1.0);
  EXPECT_EQ(perfect.recall, 1.0);
  EXPECT_EQ(perfect.f1, 1.0);

  const Prf none = ComputePrf({}, three, MatchMode::kPartial);
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.f1, 0.0);

  const std::vector<Triplet> pred = {{"a", "b", "c"}, {"d", "e", "f"}}, gold = {{"a", "b", "c"}};
  const Prf prf = ComputePrf(pred, gold, MatchMode::kStrict);
  EXPECT_DOUBLE_EQ(prf.precision, 0.5);
  EXPECT_DOUBLE_EQ(prf.recall, 1.0);
  EXPECT_DOUBLE_EQ(prf.f1, 2.0 / 3.0);
}

TEST(ComputePrfTest, SymmetryDominanceAndHarmonicMean) {
  std::mt19937 rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const auto pred = RandomTriplets(rng, 4), gold = RandomTriplets(rng, 4);
    for (MatchMode mode : kAllMatchModes) {
      const Prf forward = ComputePrf(pred, gold, mode), backward = ComputePrf(gold, pred, mode);
      EXPECT_NEAR(forward.precision, backward.recall, 1e-12);
      const double pr = forward.precision + forward.recall;
      EXPECT_NEAR(forward.f1, pr == 0.0 ? 0.0 : 2 * forward.precision * forward.recall / pr, 1e-12);
      EXPECT_GE(forward.f1, 0.0);
      EXPECT_LE(forward.f1, 1.0);
    }
    const double strict = AlignTriplets(pred, gold, MatchMode::kStrict).total;
    const double exact = AlignTriplets(pred, gold, MatchMode::kExact).total;
    const double partial = AlignTriplets(pred, gold, MatchMode::kPartial).total;
    EXPECT_LE(strict, exact + 1e-12);
    EXPECT_LE(exact, partial + 1e-12);
  }
}

// ---- Per-element breakdown ----

TEST(PerElementTest, Identity) {
  const std::vector<Triplet> t = {{"a", "b", "c"}, {"d", "e", "f"}};
  const ElementBreakdown b = PerElementBreakdown(t, t);
  for (Element e : kAllElements) EXPECT_EQ(b[e].f1, 1.0) << ElementName(e);
}

TEST(PerElementTest, WrongRelation) {
  const ElementCounts c = CountElementMatches(std::vector<Triplet>{{"a", "x", "c"}}, std::vector<Triplet>{{"a", "b", "c"}});
  EXPECT_EQ(c.matched[static_cast<int>(Element::kSubject)], 1.0);
  EXPECT_EQ(c.matched[static_cast<int>(Element::kObject)], 1.0);
  EXPECT_EQ(c.matched[static_cast<int>(Element::kPair)], 1.0);
  EXPECT_EQ(c.matched[static_cast<int>(Element::kRelation)], 0.0);
  EXPECT_EQ(c.matched[static_cast<int>(Element::kTriple)], 0.0);
}

using Counts = std::array<int, 5>;

// Element counts for every maximum-total Strict assignment.
std::set<Counts> OracleElementCounts(const std::vector<Triplet> &pred, const std::vector<Triplet> &gold) {
  const double best = OracleTotal(pred, gold, MatchMode::kStrict);
  std::set<Counts> out;
  ForEachAssignment(pred.size(), gold.size(), [&](const std::vector<std::pair<int, int>> &pairs) {
    double total = 0.0;
    Counts c{};
    for (const auto &[i, j] : pairs) {
      total += OracleTriple(pred[i], gold[j], MatchMode::kStrict);
      const bool s = OracleElement(pred[i].subject, gold[j].subject, MatchMode::kStrict) == 1.0;
      const bool r = OracleElement(pred[i].relation, gold[j].relation, MatchMode::kStrict) == 1.0;
      const bool o = OracleElement(pred[i].object, gold[j].object, MatchMode::kStrict) == 1.0;
      c[0] += s;
      c[1] += r;
      c[2] += o;
      c[3] += s && o;
      c[4] += s && r && o;
    }
    if (std::abs(total - best) < 1e-9) out.insert(c);
  });
  return out;
}

TEST(PerElementTest, SyntheticCorpusMatchesOracle) {
  std::mt19937 rng(20);
  std::array<double, 5> matched{};
  std::size_t n_pred = 0, n_gold = 0;
  int unique = 0;
  MetricsAccumulator acc;
  for (int s = 0; s < 20; ++s) {
    const auto pred = RandomTriplets(rng, 4), gold = RandomTriplets(rng, 4);
    acc.Add(pred, gold);
    const ElementCounts got = CountElementMatches(pred, gold);
    Counts got_int{};
    for (int e = 0; e < 5; ++e) got_int[e] = static_cast<int>(got.matched[e]);
    const std::set<Counts> allowed = OracleElementCounts(pred, gold);
    // The implementation must pick one of the optimal assignments.
    EXPECT_TRUE(allowed.count(got_int)) << "sentence " << s;
    unique += allowed.size() == 1;
    for (int e = 0; e < 5; ++e) matched[e] += got_int[e];
    n_pred += pred.size();
    n_gold += gold.size();
  }
  EXPECT_GT(unique, 10);
  const MetricsReport report = acc.Report();
  for (Element e : kAllElements) {
    const int k = static_cast<int>(e);
    const double p = n_pred ? matched[k] / n_pred : 0.0, r = n_gold ? matched[k] / n_gold : 0.0;
    EXPECT_NEAR(report.elements[e].precision, p, 1e-9);
    EXPECT_NEAR(report.elements[e].recall, r, 1e-9);
    EXPECT_NEAR(report.elements[e].f1, p + r == 0 ? 0.0 : 2 * p * r / (p + r), 1e-9);
  }
}

// ---- Corpus accumulation and report emission ----

TEST(MetricsAccumulatorTest, MicroAverages) {
  MetricsAccumulator acc;
  acc.Add(std::vector<Triplet>{{"a", "b", "c"}}, std::vector<Triplet>{{"a", "b", "c"}});
  acc.Add(std::vector<Triplet>{{"a", "b", "c"}, {"d", "e", "f"}, {"g", "h", "i"}}, std::vector<Triplet>{});
  const MetricsReport report = acc.Report();
  EXPECT_EQ(report.n_sentences, 2u);
  EXPECT_EQ(report.n_pred, 4u);
  EXPECT_EQ(report.n_gold, 1u);
  EXPECT_DOUBLE_EQ(report[MatchMode::kStrict].precision, 0.25);
  EXPECT_DOUBLE_EQ(report[MatchMode::kStrict].recall, 1.0);
}

TEST(MetricsReportTest, JsonAndCsv) {
  MetricsAccumulator acc;
  acc.Add(std::vector<Triplet>{{"a", "b", "c"}, {"d", "e", "f"}}, std::vector<Triplet>{{"a", "b", "c"}});
  const MetricsReport report = acc.Report();
  const auto json = report.ToJson();
  EXPECT_EQ(json["n_pred"], 2);
  EXPECT_EQ(json["n_gold"], 1);
  EXPECT_DOUBLE_EQ(json["modes"]["strict"]["precision"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(json["elements_strict"]["tri"]["recall"].get<double>(), 1.0);

  const std::string csv = report.ToCsv();
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "kind,name,precision,recall,f1");
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    // Recompute the harmonic mean from the emitted row.
    const std::size_t last = line.rfind(','), mid = line.rfind(',', last - 1), first = line.rfind(',', mid - 1);
    const double p = std::stod(line.substr(first + 1)), r = std::stod(line.substr(mid + 1));
    const double f = std::stod(line.substr(last + 1));
    EXPECT_NEAR(f, p + r == 0 ? 0.0 : 2 * p * r / (p + r), 1e-6) << line;
  }
  EXPECT_EQ(rows, 8);
  EXPECT_NE(csv.find("mode,\"strict\",0.500000,1.000000,0.666667"), std::string::npos) << csv;
}

// ---- Hit@k ----

TEST(HitAtKTest, Examples) {
  const std::vector<std::string> ranked = {"buildDate", "state", "productionLocation"};
  EXPECT_EQ(HitAtK(ranked, "builddate", 1), 1);
  EXPECT_EQ(HitAtK(ranked, "productionLocation", 2), 0);
  EXPECT_EQ(HitAtK(ranked, "productionLocation", 3), 1);
  EXPECT_EQ(HitAtK(ranked, "productionLocation", 10), 1);
  EXPECT_EQ(HitAtK({}, "x", 1), 0);
  EXPECT_THROW(HitAtK(ranked, "state", 0), Error);
}

TEST(HitAtKTest, MonotoneInK) {
  std::mt19937 rng(4);
  int hit1 = 0, hit3 = 0, hit5 = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> ranked(kVocab.begin(), kVocab.end());
    std::shuffle(ranked.begin(), ranked.end(), rng);
    const std::string gold = kVocab[rng() % kVocab.size()];
    int previous = 0;
    for (int k = 1; k <= 11; ++k) {
      const int h = HitAtK(ranked, gold, k);
      EXPECT_GE(h, previous);
      previous = h;
    }
    hit1 += HitAtK(ranked, gold, 1);
    hit3 += HitAtK(ranked, gold, 3);
    hit5 += HitAtK(ranked, gold, 5);
  }
  EXPECT_LE(hit1, hit3);
  EXPECT_LE(hit3, hit5);
}

}  // namespace
}  // namespace krpo
