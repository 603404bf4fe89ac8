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

#ifndef KRPO_METRICS_H_
#define KRPO_METRICS_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "krpo/triplet.h"

namespace krpo {

// Token-level triple matching regimes.
//   Strict:  slot-aligned, element scores in {0, 1}.
//   Exact:   element scores in {0, 1}; subject/object may be swapped.
//   Partial: element scores in {0, 0.5, 1}; subject/object may be swapped.
enum class MatchMode { kPartial, kStrict, kExact };
inline constexpr std::array<MatchMode, 3> kAllMatchModes = {
    MatchMode::kPartial, MatchMode::kStrict, MatchMode::kExact};

std::string_view MatchModeName(MatchMode mode);  // "partial", ...

// 1 when the normalized token sequences are equal. In Partial mode 0.5 when
// they share a token or one normalized string contains the other. Else 0.
double ElementMatchScore(std::string_view pred, std::string_view gold,
                         MatchMode mode);

// Mean of the three slot-aligned element scores; Exact and Partial take the
// better of the aligned and the subject/object-swapped orientation.
double TripleMatchScore(const Triplet &pred, const Triplet &gold, MatchMode mode);

struct Alignment {
  // (pred index, gold index), each side used at most once, score > 0.
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> pair_scores;
  double total = 0.0;
};

// One-to-one assignment maximizing the summed triple score. Exact when the
// smaller side has at most kExactAlignmentLimit triplets, greedy above
// that (best pair first, ties by pred index then gold index).
inline constexpr std::size_t kExactAlignmentLimit = 8;
Alignment AlignTriplets(std::span<const Triplet> pred,
                        std::span<const Triplet> gold, MatchMode mode);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// precision = total/n_pred, recall = total/n_gold (0 for empty sides),
// f1 = harmonic mean (0 when both are 0).
Prf PrfFromTotals(double total, std::size_t n_pred, std::size_t n_gold);

Prf ComputePrf(std::span<const Triplet> pred, std::span<const Triplet> gold,
               MatchMode mode);

enum class Element { kSubject, kRelation, kObject, kPair, kTriple };
inline constexpr std::array<Element, 5> kAllElements = {
    Element::kSubject, Element::kRelation, Element::kObject, Element::kPair,
    Element::kTriple};
std::string_view ElementName(Element element);  // "s", "r", "o", "(s,o)", "tri"

// Matched-element counts under the Strict assignment.
struct ElementCounts {
  std::array<double, 5> matched{};
  std::size_t n_pred = 0;
  std::size_t n_gold = 0;
};

ElementCounts CountElementMatches(std::span<const Triplet> pred,
                                  std::span<const Triplet> gold);

struct ElementBreakdown {
  std::array<Prf, 5> by_element;
  const Prf &operator[](Element e) const {
    return by_element[static_cast<int>(e)];
  }
};

ElementBreakdown PerElementBreakdown(std::span<const Triplet> pred,
                                     std::span<const Triplet> gold);

struct MetricsReport {
  std::array<Prf, 3> by_mode;  // indexed by MatchMode
  ElementBreakdown elements;
  std::size_t n_pred = 0;
  std::size_t n_gold = 0;
  std::size_t n_sentences = 0;

  const Prf &operator[](MatchMode m) const { return by_mode[static_cast<int>(m)]; }

  nlohmann::ordered_json ToJson() const;
  // "kind,name,precision,recall,f1" then one row per mode and per element.
  std::string ToCsv() const;
};

// Micro-averaged corpus metrics: totals and counts are summed over
// sentences before dividing.
class MetricsAccumulator {
 public:
  void Add(std::span<const Triplet> pred, std::span<const Triplet> gold);
  MetricsReport Report() const;

 private:
  std::array<double, 3> totals_{};
  ElementCounts elements_;
  std::size_t n_sentences_ = 0;
};

// 1 when gold_relation (normalized) is among the first k entries.
int HitAtK(std::span<const std::string> ranked, std::string_view gold_relation,
           int k);

}  // namespace krpo

#endif  // KRPO_METRICS_H_
