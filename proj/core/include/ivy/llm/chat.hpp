#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include "ivy/transport.hpp"

namespace ivy::llm {

// Pipeline stage a request belongs to; recorded in knowledge traces.
enum class StageTag {
  kRelevance,
  kKScore,
  kGenerate,
  kRefine,
  kOptimize,
  kJudgeGrounding,
  kJudgeRetention,
};

std::string_view to_string(StageTag tag);
StageTag stage_tag_from(std::string_view s);

struct ChatRequest {
  std::string system_prompt;
  std::string user_message;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  StageTag tag = StageTag::kGenerate;
};

enum class BackendKind { kRemote, kMock };

std::string_view to_string(BackendKind kind);

struct ChatResponse {
  std::string text;
  BackendKind backend = BackendKind::kMock;
  std::chrono::microseconds latency{0};
};

// One attempt at a completion. Retries and trace recording live in Gateway.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual BackendKind kind() const = 0;
  virtual ChatResponse complete(const ChatRequest& request) const = 0;
};

struct RemoteChatConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string model;
  std::string api_key;
  std::chrono::milliseconds timeout{60000};
};

// OpenAI-compatible POST {base_url}/chat/completions.
class HttpChatBackend final : public ChatBackend {
 public:
  explicit HttpChatBackend(RemoteChatConfig config);

  BackendKind kind() const override { return BackendKind::kRemote; }
  ChatResponse complete(const ChatRequest& request) const override;

 private:
  RemoteChatConfig config_;
};

}  // namespace ivy::llm
