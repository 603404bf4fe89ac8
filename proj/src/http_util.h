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

#ifndef KRPO_SRC_HTTP_UTIL_H_
#define KRPO_SRC_HTTP_UTIL_H_

#include <string>
#include <string_view>

namespace krpo {
namespace internal {

struct SplitUrl {
  std::string scheme_host_port;  // "https://api.example.com:443"
  std::string path;              // "/v1/chat/completions"
};

// Throws Error(kInvalidArgument) when url lacks an http(s) scheme.
SplitUrl SplitHttpUrl(std::string_view url);

}  // namespace internal
}  // namespace krpo

#endif  // KRPO_SRC_HTTP_UTIL_H_
