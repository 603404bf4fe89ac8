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
#include <cstdio>
#include <limits>

#include "krpo/error.h"
#include "krpo/text.h"

namespace krpo {
namespace {

// Scores are kept in integer units of 1/6 (element scores 0, 0.5, 1 are
// 0, 1, 2 half-units; a triple sums three of them) so ties are exact.
constexpr double kUnitsPerTriple = 6.0;

struct NormalizedField {
  std::vector<std::string> tokens;
  std::string joined;
};

NormalizedField NormalizeField(std::string_view text) {
  NormalizedField field;
  field.tokens = NormalizeText(text);
  for (const std::string &token : field.tokens) {
    if (!field.joined.empty()) field.joined.push_back(' ');
    field.joined += token;
  }
  return field;
}

struct NormalizedTriplet {
  NormalizedField subject;
  NormalizedField relation;
  NormalizedField object;
};

NormalizedTriplet NormalizeTriplet(const Triplet &t) {
  return {NormalizeField(t.subject), NormalizeField(t.relation),
          NormalizeField(t.object)};
}

bool ShareToken(const std::vector<std::string> &a,
                const std::vector<std::string> &b) {
  for (const std::string &token : a) {
    if (std::find(b.begin(), b.end(), token) != b.end()) return true;
  }
  return false;
}

int ElementUnits(const NormalizedField &pred, const NormalizedField &gold,
                 MatchMode mode) {
  if (pred.tokens == gold.tokens) return 2;
  if (mode != MatchMode::kPartial) return 0;
  if (ShareToken(pred.tokens, gold.tokens)) return 1;
  if (!pred.joined.empty() && !gold.joined.empty() &&
      (pred.joined.find(gold.joined) != std::string::npos ||
       gold.joined.find(pred.joined) != std::string::npos)) {
    return 1;
  }
  return 0;
}

int TripleUnits(const NormalizedTriplet &pred, const NormalizedTriplet &gold,
                MatchMode mode) {
  const int relation = ElementUnits(pred.relation, gold.relation, mode);
  const int aligned = ElementUnits(pred.subject, gold.subject, mode) + relation +
                      ElementUnits(pred.object, gold.object, mode);
  if (mode == MatchMode::kStrict) return aligned;
  const int swapped = ElementUnits(pred.subject, gold.object, mode) + relation +
                      ElementUnits(pred.object, gold.subject, mode);
  return std::max(aligned, swapped);
}

std::vector<std::vector<int>> UnitMatrix(std::span<const Triplet> pred,
                                         std::span<const Triplet> gold,
                                         MatchMode mode) {
  std::vector<NormalizedTriplet> p, g;
  for (const Triplet &t : pred) p.push_back(NormalizeTriplet(t));
  for (const Triplet &t : gold) g.push_back(NormalizeTriplet(t));
  std::vector<std::vector<int>> units(p.size(), std::vector<int>(g.size(), 0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      units[i][j] = TripleUnits(p[i], g[j], mode);
    }
  }
  return units;
}

// Exact maximum-weight matching by dynamic programming over subsets of the
// smaller side (at most 2^8 states), scanning the larger side once.
std::vector<std::pair<int, int>> ExactAssignment(
    const std::vector<std::vector<int>> &units, std::size_t n_pred,
    std::size_t n_gold) {
  const bool pred_is_small = n_pred <= n_gold;
  const std::size_t small = pred_is_small ? n_pred : n_gold;
  const std::size_t large = pred_is_small ? n_gold : n_pred;
  auto weight = [&](std::size_t s, std::size_t l) {
    return pred_is_small ? units[s][l] : units[l][s];
  };
  const std::size_t states = std::size_t{1} << small;
  constexpr int kUnreachable = std::numeric_limits<int>::min();

  // best[l][mask]: best sum using the first l large items with the small
  // items in mask matched. choice records which small item took item l-1.
  std::vector<std::vector<int>> best(large + 1, std::vector<int>(states, kUnreachable));
  std::vector<std::vector<int>> choice(large + 1, std::vector<int>(states, -1));
  best[0][0] = 0;
  for (std::size_t l = 0; l < large; ++l) {
    for (std::size_t mask = 0; mask < states; ++mask) {
      if (best[l][mask] == kUnreachable) continue;
      if (best[l][mask] > best[l + 1][mask]) {
        best[l + 1][mask] = best[l][mask];
        choice[l + 1][mask] = -1;
      }
      for (std::size_t s = 0; s < small; ++s) {
        if (mask & (std::size_t{1} << s)) continue;
        const int w = weight(s, l);
        if (w <= 0) continue;
        const std::size_t next = mask | (std::size_t{1} << s);
        if (best[l][mask] + w > best[l + 1][next]) {
          best[l + 1][next] = best[l][mask] + w;
          choice[l + 1][next] = static_cast<int>(s);
        }
      }
    }
  }

  std::size_t mask = 0;
  for (std::size_t m = 0; m < states; ++m) {
    if (best[large][m] > best[large][mask]) mask = m;
  }
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t l = large; l > 0; --l) {
    const int s = choice[l][mask];
    if (s < 0) continue;
    pairs.emplace_back(pred_is_small ? s : static_cast<int>(l - 1),
                       pred_is_small ? static_cast<int>(l - 1) : s);
    mask &= ~(std::size_t{1} << s);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<std::pair<int, int>> GreedyAssignment(
    const std::vector<std::vector<int>> &units, std::size_t n_pred,
    std::size_t n_gold) {
  struct Candidate {
    int units;
    int pred;
    int gold;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < n_pred; ++i) {
    for (std::size_t j = 0; j < n_gold; ++j) {
      if (units[i][j] > 0) {
        candidates.push_back({units[i][j], static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate &a, const Candidate &b) {
              if (a.units != b.units) return a.units > b.units;
              if (a.pred != b.pred) return a.pred < b.pred;
              return a.gold < b.gold;
            });
  std::vector<bool> pred_used(n_pred, false), gold_used(n_gold, false);
  std::vector<std::pair<int, int>> pairs;
  for (const Candidate &c : candidates) {
    if (pred_used[c.pred] || gold_used[c.gold]) continue;
    pred_used[c.pred] = gold_used[c.gold] = true;
    pairs.emplace_back(c.pred, c.gold);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::string FormatValue(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

}  // namespace

std::string_view MatchModeName(MatchMode mode) {
  switch (mode) {
    case MatchMode::kPartial: return "partial";
    case MatchMode::kStrict: return "strict";
    case MatchMode::kExact: return "exact";
  }
  return "strict";
}

std::string_view ElementName(Element element) {
  switch (element) {
    case Element::kSubject: return "s";
    case Element::kRelation: return "r";
    case Element::kObject: return "o";
    case Element::kPair: return "(s,o)";
    case Element::kTriple: return "tri";
  }
  return "tri";
}

double ElementMatchScore(std::string_view pred, std::string_view gold,
                         MatchMode mode) {
  return ElementUnits(NormalizeField(pred), NormalizeField(gold), mode) / 2.0;
}

double TripleMatchScore(const Triplet &pred, const Triplet &gold, MatchMode mode) {
  return TripleUnits(NormalizeTriplet(pred), NormalizeTriplet(gold), mode) /
         kUnitsPerTriple;
}

Alignment AlignTriplets(std::span<const Triplet> pred,
                        std::span<const Triplet> gold, MatchMode mode) {
  Alignment alignment;
  if (pred.empty() || gold.empty()) return alignment;
  const std::vector<std::vector<int>> units = UnitMatrix(pred, gold, mode);
  alignment.pairs =
      std::min(pred.size(), gold.size()) <= kExactAlignmentLimit
          ? ExactAssignment(units, pred.size(), gold.size())
          : GreedyAssignment(units, pred.size(), gold.size());
  int total_units = 0;
  for (const auto &[i, j] : alignment.pairs) {
    alignment.pair_scores.push_back(units[i][j] / kUnitsPerTriple);
    total_units += units[i][j];
  }
  alignment.total = total_units / kUnitsPerTriple;
  return alignment;
}

Prf PrfFromTotals(double total, std::size_t n_pred, std::size_t n_gold) {
  Prf prf;
  prf.precision = n_pred == 0 ? 0.0 : total / static_cast<double>(n_pred);
  prf.recall = n_gold == 0 ? 0.0 : total / static_cast<double>(n_gold);
  const double sum = prf.precision + prf.recall;
  prf.f1 = sum == 0.0 ? 0.0 : 2.0 * prf.precision * prf.recall / sum;
  return prf;
}

Prf ComputePrf(std::span<const Triplet> pred, std::span<const Triplet> gold,
               MatchMode mode) {
  return PrfFromTotals(AlignTriplets(pred, gold, mode).total, pred.size(),
                       gold.size());
}

ElementCounts CountElementMatches(std::span<const Triplet> pred,
                                  std::span<const Triplet> gold) {
  ElementCounts counts;
  counts.n_pred = pred.size();
  counts.n_gold = gold.size();
  const Alignment alignment = AlignTriplets(pred, gold, MatchMode::kStrict);
  for (const auto &[i, j] : alignment.pairs) {
    const NormalizedTriplet p = NormalizeTriplet(pred[i]);
    const NormalizedTriplet g = NormalizeTriplet(gold[j]);
    const bool s = p.subject.tokens == g.subject.tokens;
    const bool r = p.relation.tokens == g.relation.tokens;
    const bool o = p.object.tokens == g.object.tokens;
    counts.matched[static_cast<int>(Element::kSubject)] += s;
    counts.matched[static_cast<int>(Element::kRelation)] += r;
    counts.matched[static_cast<int>(Element::kObject)] += o;
    counts.matched[static_cast<int>(Element::kPair)] += s && o;
    counts.matched[static_cast<int>(Element::kTriple)] += s && r && o;
  }
  return counts;
}

ElementBreakdown PerElementBreakdown(std::span<const Triplet> pred,
                                     std::span<const Triplet> gold) {
  const ElementCounts counts = CountElementMatches(pred, gold);
  ElementBreakdown breakdown;
  for (Element e : kAllElements) {
    breakdown.by_element[static_cast<int>(e)] = PrfFromTotals(
        counts.matched[static_cast<int>(e)], counts.n_pred, counts.n_gold);
  }
  return breakdown;
}

void MetricsAccumulator::Add(std::span<const Triplet> pred,
                             std::span<const Triplet> gold) {
  for (MatchMode mode : kAllMatchModes) {
    totals_[static_cast<int>(mode)] += AlignTriplets(pred, gold, mode).total;
  }
  const ElementCounts counts = CountElementMatches(pred, gold);
  for (std::size_t e = 0; e < counts.matched.size(); ++e) {
    elements_.matched[e] += counts.matched[e];
  }
  elements_.n_pred += counts.n_pred;
  elements_.n_gold += counts.n_gold;
  ++n_sentences_;
}

MetricsReport MetricsAccumulator::Report() const {
  MetricsReport report;
  report.n_pred = elements_.n_pred;
  report.n_gold = elements_.n_gold;
  report.n_sentences = n_sentences_;
  for (MatchMode mode : kAllMatchModes) {
    report.by_mode[static_cast<int>(mode)] =
        PrfFromTotals(totals_[static_cast<int>(mode)], report.n_pred, report.n_gold);
  }
  for (Element e : kAllElements) {
    report.elements.by_element[static_cast<int>(e)] = PrfFromTotals(
        elements_.matched[static_cast<int>(e)], report.n_pred, report.n_gold);
  }
  return report;
}

nlohmann::ordered_json MetricsReport::ToJson() const {
  auto prf_json = [](const Prf &prf) {
    nlohmann::ordered_json j;
    j["precision"] = prf.precision;
    j["recall"] = prf.recall;
    j["f1"] = prf.f1;
    return j;
  };
  nlohmann::ordered_json doc;
  doc["n_sentences"] = n_sentences;
  doc["n_pred"] = n_pred;
  doc["n_gold"] = n_gold;
  for (MatchMode mode : kAllMatchModes) {
    doc["modes"][std::string(MatchModeName(mode))] = prf_json((*this)[mode]);
  }
  for (Element e : kAllElements) {
    doc["elements_strict"][std::string(ElementName(e))] = prf_json(elements[e]);
  }
  return doc;
}

std::string MetricsReport::ToCsv() const {
  std::string csv = "kind,name,precision,recall,f1\n";
  auto row = [&](std::string_view kind, std::string_view name, const Prf &prf) {
    csv += std::string(kind) + ",\"" + std::string(name) + "\"," +
           FormatValue(prf.precision) + "," + FormatValue(prf.recall) + "," +
           FormatValue(prf.f1) + "\n";
  };
  for (MatchMode mode : kAllMatchModes) row("mode", MatchModeName(mode), (*this)[mode]);
  for (Element e : kAllElements) row("element", ElementName(e), elements[e]);
  return csv;
}

int HitAtK(std::span<const std::string> ranked, std::string_view gold_relation,
           int k) {
  CheckPrecondition(k >= 1, "k >= 1");
  const std::string gold = NormalizedKey(gold_relation);
  const std::size_t limit = std::min(ranked.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < limit; ++i) {
    if (NormalizedKey(ranked[i]) == gold) return 1;
  }
  return 0;
}

}  // namespace krpo
