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

#include "krpo/llm_gateway.h"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "glog/logging.h"
#include "http_util.h"
#include "krpo/error.h"
#include "krpo/file_util.h"

namespace krpo {

namespace internal {

SplitUrl SplitHttpUrl(std::string_view url) {
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos ||
      (url.substr(0, scheme_end) != "http" &&
       url.substr(0, scheme_end) != "https")) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected an http(s) URL, got '" + std::string(url) + "'");
  }
  std::size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) {
    return {std::string(url), "/"};
  }
  return {std::string(url.substr(0, path_start)),
          std::string(url.substr(path_start))};
}

}  // namespace internal

namespace {

constexpr std::array<std::string_view, kNumCallRoles> kRoleTags = {
    "extract", "restore", "nli", "grad1", "grad2", "update", "rc_decide"};

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

bool IsRetryableStatus(int status) {
  return status == 408 || status == 409 || status == 429 || status >= 500;
}

}  // namespace

std::string_view RoleTag(CallRole role) {
  return kRoleTags[static_cast<int>(role)];
}

std::optional<CallRole> ParseRoleTag(std::string_view tag) {
  for (int i = 0; i < kNumCallRoles; ++i) {
    if (kRoleTags[i] == tag) return static_cast<CallRole>(i);
  }
  return std::nullopt;
}

nlohmann::json RequestEnvelope(const ChatRequest &req) {
  nlohmann::json envelope;
  envelope["system"] = req.system_text ? nlohmann::json(*req.system_text)
                                       : nlohmann::json(nullptr);
  envelope["user"] = req.user_text;
  envelope["temperature"] = req.temperature;
  envelope["max_tokens"] = req.max_output_tokens;
  envelope["tag"] = std::string(RoleTag(req.role));
  return envelope;
}

ChatRequest RequestFromEnvelope(const nlohmann::json &envelope) {
  ChatRequest req;
  if (!envelope.at("system").is_null()) {
    req.system_text = envelope.at("system").get<std::string>();
  }
  req.user_text = envelope.at("user").get<std::string>();
  req.temperature = envelope.at("temperature").get<double>();
  req.max_output_tokens = envelope.at("max_tokens").get<int>();
  std::string tag = envelope.at("tag").get<std::string>();
  std::optional<CallRole> role = ParseRoleTag(tag);
  if (!role) {
    throw Error(ErrorCode::kParseError, "unknown request tag '" + tag + "'");
  }
  req.role = *role;
  return req;
}

std::string RequestFingerprint(const ChatRequest &req) {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  return Sha256Hex(RequestEnvelope(req).dump());
}

std::optional<HttpChatTransport::Options>
HttpChatTransport::OptionsFromEnvironment() {
  const char *endpoint = std::getenv("KRPO_LLM_ENDPOINT");
  if (endpoint == nullptr || *endpoint == '\0') return std::nullopt;
  Options options;
  options.endpoint = endpoint;
  if (const char *key = std::getenv("KRPO_LLM_API_KEY")) options.api_key = key;
  if (const char *model = std::getenv("KRPO_LLM_MODEL")) options.model = model;
  return options;
}

HttpChatTransport::HttpChatTransport(Options options)
    : options_(std::move(options)) {}

std::string HttpChatTransport::BackendId() const {
  return options_.model.empty() ? options_.endpoint
                                : options_.model + "@" + options_.endpoint;
}

std::string HttpChatTransport::Send(const ChatRequest &req) {
  internal::SplitUrl url = internal::SplitHttpUrl(options_.endpoint);
  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  client.set_write_timeout(options_.timeout_seconds, 0);

  nlohmann::json messages = nlohmann::json::array();
  if (req.system_text) {
    messages.push_back({{"role", "system"}, {"content", *req.system_text}});
  }
  messages.push_back({{"role", "user"}, {"content", req.user_text}});
  nlohmann::json body = {{"messages", messages},
                         {"temperature", req.temperature},
                         {"max_tokens", req.max_output_tokens}};
  if (!options_.model.empty()) body["model"] = options_.model;

  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  httplib::Result result =
      client.Post(url.path, headers, body.dump(), "application/json");
  if (!result) {
    throw TransportFailure(
        "transport error: " + httplib::to_string(result.error()), true);
  }
  if (result->status != 200) {
    throw TransportFailure("HTTP " + std::to_string(result->status) + ": " +
                               result->body.substr(0, 200),
                           IsRetryableStatus(result->status));
  }
  try {
    nlohmann::json reply = nlohmann::json::parse(result->body);
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception &e) {
    throw TransportFailure(std::string("malformed completion body: ") + e.what(),
                           false);
  }
}

std::string_view ReplayModeName(ReplayMode mode) {
  switch (mode) {
    case ReplayMode::kRecord: return "record";
    case ReplayMode::kReplay: return "replay";
    case ReplayMode::kPassthrough: return "off";
  }
  return "off";
}

ReplayMode ParseReplayMode(std::string_view name) {
  if (name == "record") return ReplayMode::kRecord;
  if (name == "replay") return ReplayMode::kReplay;
  if (name == "off" || name == "passthrough") return ReplayMode::kPassthrough;
  throw Error(ErrorCode::kInvalidArgument,
              "replay mode must be record|replay|off, got '" +
                  std::string(name) + "'");
}

ReplayStore::ReplayStore(std::filesystem::path root, ReplayMode mode)
    : root_(std::move(root)), mode_(mode) {}

std::filesystem::path ReplayStore::RecordPath(
    const std::string &fingerprint) const {
  return root_ / (fingerprint + ".json");
}

std::optional<std::string> ReplayStore::Lookup(
    const std::string &fingerprint) const {
  if (mode_ == ReplayMode::kPassthrough) return std::nullopt;
  std::ifstream in(RecordPath(fingerprint), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    nlohmann::json record = nlohmann::json::parse(in);
    return record.at("response").get<std::string>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kParseError, "corrupt replay record " +
                                            RecordPath(fingerprint).string() +
                                            ": " + e.what());
  }
}

void ReplayStore::Save(const ChatRequest &req, const std::string &fingerprint,
                       const std::string &response) {
  if (mode_ != ReplayMode::kRecord) return;
  nlohmann::json record = {{"fingerprint", fingerprint},
                           {"request", RequestEnvelope(req)},
                           {"response", response}};
  std::lock_guard<std::mutex> lock(write_mu_);
  std::filesystem::create_directories(root_);
  WriteFileAtomically(RecordPath(fingerprint), record.dump(2) + "\n");
}

LlmGateway::LlmGateway(std::shared_ptr<ReplayStore> store,
                       std::shared_ptr<ChatTransport> transport,
                       RetryPolicy retry)
    : store_(std::move(store)),
      transport_(std::move(transport)),
      retry_(retry) {
  CHECK(store_ != nullptr);
}

int LlmGateway::Calls(CallRole role) const {
  return calls_[static_cast<int>(role)].load();
}

int LlmGateway::TotalCalls() const {
  int total = 0;
  for (const auto &count : calls_) total += count.load();
  return total;
}

ChatResponse LlmGateway::Complete(const ChatRequest &req) {
  CheckPrecondition(!req.user_text.empty(), "ChatRequest.user_text non-empty");
  CheckPrecondition(req.temperature >= 0, "ChatRequest.temperature >= 0");
  CheckPrecondition(req.max_output_tokens > 0,
                    "ChatRequest.max_output_tokens > 0");
  calls_[static_cast<int>(req.role)].fetch_add(1);

  const std::string fingerprint = RequestFingerprint(req);
  if (store_->mode() != ReplayMode::kPassthrough) {
    if (std::optional<std::string> stored = store_->Lookup(fingerprint)) {
      return {std::move(*stored), "replay", 0};
    }
    if (store_->mode() == ReplayMode::kReplay) {
      throw Error(ErrorCode::kReplayMiss,
                  "no record for " + std::string(RoleTag(req.role)) +
                      " request " + fingerprint + " in " +
                      store_->root().string());
    }
  }

  auto start = std::chrono::steady_clock::now();
  std::string text = CallLive(req);
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  store_->Save(req, fingerprint, text);
  return {std::move(text), transport_->BackendId(), elapsed.count()};
}

std::string LlmGateway::CallLive(const ChatRequest &req) {
  if (transport_ == nullptr) {
    throw Error(ErrorCode::kBackendError,
                "no LLM backend configured (set KRPO_LLM_ENDPOINT)");
  }
  auto backoff = retry_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
    live_calls_.fetch_add(1);
    try {
      return transport_->Send(req);
    } catch (const TransportFailure &failure) {
      last_error = failure.what();
      if (!failure.retryable()) {
        throw Error(ErrorCode::kBackendError, last_error);
      }
      LOG(WARNING) << RoleTag(req.role) << " call attempt " << attempt
                   << " failed: " << last_error;
    }
    if (attempt < retry_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<std::int64_t>(backoff.count() * retry_.multiplier));
    }
  }
  throw Error(ErrorCode::kBackendError,
              "retries exhausted after " + std::to_string(retry_.max_attempts) +
                  " attempts: " + last_error);
}

}  // namespace krpo
