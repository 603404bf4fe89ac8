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

#include "krpo/error.h"

namespace krpo {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedTriplet: return "MalformedTriplet";
    case ErrorCode::kReplayMiss: return "ReplayMiss";
    case ErrorCode::kBackendError: return "BackendError";
    case ErrorCode::kEmptyExtraction: return "EmptyExtraction";
    case ErrorCode::kEmptyRestoration: return "EmptyRestoration";
    case ErrorCode::kNliParseError: return "NLIParseError";
    case ErrorCode::kGradientEmpty: return "GradientEmpty";
    case ErrorCode::kRemoteScorerUnavailable: return "RemoteScorerUnavailable";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kMissingGold: return "MissingGold";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

void CheckPrecondition(bool condition, const char *what) {
  if (!condition) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("precondition violated: ") + what);
  }
}

}  // namespace krpo
