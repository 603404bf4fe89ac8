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

#ifndef KRPO_LLM_GATEWAY_H_
#define KRPO_LLM_GATEWAY_H_

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace krpo {

// Closed set of roles a model call can play in the pipeline. The tag is part
// of the request fingerprint.
enum class CallRole { kExtract, kRestore, kNli, kGrad1, kGrad2, kUpdate, kRcDecide };
inline constexpr int kNumCallRoles = 7;

std::string_view RoleTag(CallRole role);
std::optional<CallRole> ParseRoleTag(std::string_view tag);

struct ChatRequest {
  std::optional<std::string> system_text;
  std::string user_text;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  CallRole role = CallRole::kExtract;
};

struct ChatResponse {
  std::string text;  // raw model output, unmodified
  std::string backend_id;
  std::int64_t latency_ms = 0;
};

// {"system","user","temperature","max_tokens","tag"}
nlohmann::json RequestEnvelope(const ChatRequest &req);
ChatRequest RequestFromEnvelope(const nlohmann::json &envelope);

// Lowercase hex SHA-256 of the envelope serialized with sorted keys.
std::string RequestFingerprint(const ChatRequest &req);

// Raised by transports. Retryable failures are retried with backoff by the
// gateway; anything else becomes BackendError at once.
class TransportFailure : public std::runtime_error {
 public:
  TransportFailure(const std::string &message, bool retryable)
      : std::runtime_error(message), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

// A live chat-completion backend.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string Send(const ChatRequest &req) = 0;
  virtual std::string BackendId() const = 0;
};

// Chat-completions over HTTP(S): POST {"model","messages","temperature",
// "max_tokens"}, reply text read from choices[0].message.content.
class HttpChatTransport : public ChatTransport {
 public:
  struct Options {
    std::string endpoint;  // full URL of the completions route
    std::string api_key;
    std::string model;
    int timeout_seconds = 120;
  };

  // Reads KRPO_LLM_ENDPOINT, KRPO_LLM_API_KEY and KRPO_LLM_MODEL. Returns
  // nullopt when the endpoint is unset.
  static std::optional<Options> OptionsFromEnvironment();

  explicit HttpChatTransport(Options options);

  std::string Send(const ChatRequest &req) override;
  std::string BackendId() const override;

 private:
  Options options_;
};

enum class ReplayMode { kRecord, kReplay, kPassthrough };

std::string_view ReplayModeName(ReplayMode mode);
ReplayMode ParseReplayMode(std::string_view name);  // record|replay|off

// One JSON record file per fingerprint under root:
//   <root>/<fingerprint>.json =
//     {"fingerprint": hex, "request": {...envelope...}, "response": text}
class ReplayStore {
 public:
  ReplayStore(std::filesystem::path root, ReplayMode mode);

  ReplayMode mode() const { return mode_; }
  const std::filesystem::path &root() const { return root_; }

  std::optional<std::string> Lookup(const std::string &fingerprint) const;
  void Save(const ChatRequest &req, const std::string &fingerprint,
            const std::string &response);

  std::filesystem::path RecordPath(const std::string &fingerprint) const;

 private:
  std::filesystem::path root_;
  ReplayMode mode_;
  std::mutex write_mu_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
};

// Single entry point for every model call. Replay mode never touches the
// transport; a miss is ReplayMiss. Record mode serves stored responses and
// persists new ones. Safe for concurrent use.
class LlmGateway {
 public:
  LlmGateway(std::shared_ptr<ReplayStore> store,
             std::shared_ptr<ChatTransport> transport,
             RetryPolicy retry = RetryPolicy());

  ChatResponse Complete(const ChatRequest &req);

  // Call-count probes.
  int Calls(CallRole role) const;
  int TotalCalls() const;
  int LiveCalls() const { return live_calls_.load(); }

  ReplayMode mode() const { return store_->mode(); }

 private:
  std::string CallLive(const ChatRequest &req);

  std::shared_ptr<ReplayStore> store_;
  std::shared_ptr<ChatTransport> transport_;
  RetryPolicy retry_;
  std::array<std::atomic<int>, kNumCallRoles> calls_{};
  std::atomic<int> live_calls_{0};
};

}  // namespace krpo

#endif  // KRPO_LLM_GATEWAY_H_
