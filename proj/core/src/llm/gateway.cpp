#include "ivy/llm/gateway.hpp"

#include "ivy/text.hpp"

namespace ivy::llm {

void CallLog::append(LlmCall call) {
  std::lock_guard lock(mu_);
  calls_.push_back(std::move(call));
}

std::vector<LlmCall> CallLog::snapshot() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::size_t CallLog::size() const {
  std::lock_guard lock(mu_);
  return calls_.size();
}

std::string request_hash(const ChatRequest& request) {
  std::string key(to_string(request.tag));
  key += '\x1f';
  key += request.system_prompt;
  key += '\x1f';
  key += request.user_message;
  return text::hex64(text::fnv1a64(key));
}

Gateway::Gateway(std::shared_ptr<const ChatBackend> backend, RetryPolicy policy, Sleeper sleep)
    : backend_(std::move(backend)), policy_(policy), sleep_(std::move(sleep)) {
  if (!backend_) throw Error(ErrorCode::kConfig, "gateway needs a backend");
}

ChatResponse Gateway::complete(const ChatRequest& request, CallLog* log) const {
  if (text::trim(request.system_prompt).empty() || text::trim(request.user_message).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "chat request prompts must be non-empty");
  }
  auto started = std::chrono::steady_clock::now();
  try {
    auto response = with_retries(policy_, [&] { return backend_->complete(request); }, sleep_);
    if (text::trim(response.text).empty()) {
      throw TransportError(ErrorCode::kEmptyCompletion,
                           std::string("empty completion for stage ") +
                               std::string(to_string(request.tag)));
    }
    response.latency = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - started);
    if (log) log->append({request.tag, request_hash(request), text::hex64(text::fnv1a64(response.text))});
    return response;
  } catch (const Error& e) {
    if (log) {
      log->append({request.tag, request_hash(request), "error:" + std::string(to_string(e.code()))});
    }
    throw;
  }
}

}  // namespace ivy::llm
