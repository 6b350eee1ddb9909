#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ivy/llm/chat.hpp"
#include "ivy/transport.hpp"

namespace ivy::llm {

struct LlmCall {
  StageTag tag = StageTag::kGenerate;
  std::string request_hash;   // fnv1a64 over tag, system prompt and user message
  std::string response_hash;  // fnv1a64 over the completion, or "error:<code>"

  bool operator==(const LlmCall&) const = default;
};

// Append-only record of the calls made on behalf of one question.
class CallLog {
 public:
  void append(LlmCall call);
  std::vector<LlmCall> snapshot() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<LlmCall> calls_;
};

std::string request_hash(const ChatRequest& request);

// Shared entry point for every model call. Thread-safe; each call is
// independent. Transient failures (transport, rate limit) are retried per the
// policy; an empty completion is reported as kEmptyCompletion without retry.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<const ChatBackend> backend, RetryPolicy policy = {},
                   Sleeper sleep = real_sleep);

  ChatResponse complete(const ChatRequest& request, CallLog* log = nullptr) const;

  BackendKind backend_kind() const { return backend_->kind(); }
  const RetryPolicy& retry_policy() const noexcept { return policy_; }

 private:
  std::shared_ptr<const ChatBackend> backend_;
  RetryPolicy policy_;
  Sleeper sleep_;
};

}  // namespace ivy::llm
