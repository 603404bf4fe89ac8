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

#ifndef KRPO_DATASET_H_
#define KRPO_DATASET_H_

#include <filesystem>
#include <string_view>
#include <vector>

#include "krpo/triplet.h"

namespace krpo {

// JSONL, one {"id": str, "text": str, "gold": [[s, r, o], ...]?} per line.
// Blank lines are skipped. Text and gold fields are NFC-normalized.
// Throws Error(kParseError) naming the 1-based line, Error(kDuplicateId).
std::vector<SentenceRecord> ParseDataset(std::string_view jsonl);
std::vector<SentenceRecord> LoadDataset(const std::filesystem::path &path);

bool AllHaveGold(const std::vector<SentenceRecord> &records);

}  // namespace krpo

#endif  // KRPO_DATASET_H_
