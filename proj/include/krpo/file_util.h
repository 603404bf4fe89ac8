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

#ifndef KRPO_FILE_UTIL_H_
#define KRPO_FILE_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace krpo {

// Writes content to a sibling temp file and renames it over path, so readers
// never observe a truncated file. Throws Error(kIoError).
void WriteFileAtomically(const std::filesystem::path &path,
                         std::string_view content);

// Throws Error(kIoError) with the path when the file cannot be read.
std::string ReadFile(const std::filesystem::path &path);

}  // namespace krpo

#endif  // KRPO_FILE_UTIL_H_
