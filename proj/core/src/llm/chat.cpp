#include "ivy/llm/chat.hpp"

#include <nlohmann/json.hpp>

namespace ivy::llm {

std::string_view to_string(StageTag tag) {
  switch (tag) {
    case StageTag::kRelevance: return "relevance";
    case StageTag::kKScore: return "kscore";
    case StageTag::kGenerate: return "generate";
    case StageTag::kRefine: return "refine";
    case StageTag::kOptimize: return "optimize";
    case StageTag::kJudgeGrounding: return "judge-grounding";
    case StageTag::kJudgeRetention: return "judge-retention";
  }
  return "generate";
}

StageTag stage_tag_from(std::string_view s) {
  for (auto tag : {StageTag::kRelevance, StageTag::kKScore, StageTag::kGenerate, StageTag::kRefine,
                   StageTag::kOptimize, StageTag::kJudgeGrounding, StageTag::kJudgeRetention}) {
    if (to_string(tag) == s) return tag;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown stage tag '" + std::string(s) + "'");
}

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::kRemote ? "remote" : "mock";
}

HttpChatBackend::HttpChatBackend(RemoteChatConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty() || config_.model.empty()) {
    throw Error(ErrorCode::kConfig, "remote chat backend needs base_url and model");
  }
}

ChatResponse HttpChatBackend::complete(const ChatRequest& request) const {
  nlohmann::json body{
      {"model", config_.model},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output_tokens},
      {"messages",
       {{{"role", "system"}, {"content", request.system_prompt}},
        {{"role", "user"}, {"content", request.user_message}}}},
  };
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;

  auto started = std::chrono::steady_clock::now();
  auto response =
      http_post_json(config_.base_url, "/chat/completions", body.dump(), headers, config_.timeout);
  raise_for_status(response, "chat endpoint");

  ChatResponse out;
  out.backend = BackendKind::kRemote;
  try {
    auto parsed = nlohmann::json::parse(response.body);
    const auto& content = parsed.at("choices").at(0).at("message").at("content");
    out.text = content.is_null() ? std::string() : content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(ErrorCode::kRejected,
                         std::string("malformed chat response: ") + e.what(), response.status);
  }
  out.latency = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::steady_clock::now() - started);
  return out;
}

}  // namespace ivy::llm
