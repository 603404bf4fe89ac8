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

#ifndef KRPO_ERROR_H_
#define KRPO_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace krpo {

enum class ErrorCode {
  kInvalidArgument,
  kMalformedTriplet,
  kReplayMiss,
  kBackendError,
  kEmptyExtraction,
  kEmptyRestoration,
  kNliParseError,
  kGradientEmpty,
  kRemoteScorerUnavailable,
  kParseError,
  kDuplicateId,
  kMissingGold,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code, so
// callers can degrade on specific conditions (e.g. ReplayMiss) and rethrow
// the rest.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Throws Error(kInvalidArgument) when a documented precondition is violated.
void CheckPrecondition(bool condition, const char *what);

}  // namespace krpo

#endif  // KRPO_ERROR_H_
