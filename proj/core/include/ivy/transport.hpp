#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>

#include "ivy/error.hpp"

namespace ivy {

// Bounded exponential backoff: attempt n (1-based) waits
// initial_backoff * multiplier^(n-1) before attempt n+1.
struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;

  std::chrono::milliseconds backoff_after(int attempt) const;
  // Sum of all waits when every attempt fails.
  std::chrono::milliseconds worst_case_wait() const;
};

// Failure talking to a remote service. Carries what a caller needs to decide
// whether and when to try again.
class TransportError : public Error {
 public:
  TransportError(ErrorCode code, const std::string& message, int http_status = 0,
                 std::optional<std::chrono::milliseconds> retry_after = std::nullopt)
      : Error(code, message), http_status_(http_status), retry_after_(retry_after) {}

  int http_status() const noexcept { return http_status_; }
  int attempts() const noexcept { return attempts_; }
  std::optional<std::chrono::milliseconds> retry_after() const noexcept { return retry_after_; }
  bool retryable() const noexcept {
    return code() == ErrorCode::kTransport || code() == ErrorCode::kRateLimited;
  }

  void set_attempts(int n) noexcept { attempts_ = n; }

 private:
  int http_status_ = 0;
  int attempts_ = 1;
  std::optional<std::chrono::milliseconds> retry_after_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

inline void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

// Runs `call` until it succeeds, throws a non-retryable error, or the policy
// runs out of attempts. The final TransportError records the attempt count.
template <typename Call>
auto with_retries(const RetryPolicy& policy, Call&& call, const Sleeper& sleep = real_sleep)
    -> decltype(call()) {
  for (int attempt = 1;; ++attempt) {
    try {
      return call();
    } catch (TransportError& e) {
      e.set_attempts(attempt);
      if (!e.retryable() || attempt >= policy.max_attempts) throw;
      auto wait = policy.backoff_after(attempt);
      if (e.retry_after() && *e.retry_after() > wait) wait = *e.retry_after();
      sleep(wait);
    }
  }
}

struct HttpResponse {
  int status = 0;
  std::string body;
  std::optional<std::chrono::milliseconds> retry_after;
};

// POST a JSON body. Connection failures surface as TransportError(kTransport);
// any HTTP status is returned to the caller.
HttpResponse http_post_json(const std::string& base_url, const std::string& path,
                            const std::string& body,
                            const std::map<std::string, std::string>& headers,
                            std::chrono::milliseconds timeout);

// Maps an HTTP status onto the transport error taxonomy. 2xx returns normally.
void raise_for_status(const HttpResponse& response, const std::string& what);

}  // namespace ivy
