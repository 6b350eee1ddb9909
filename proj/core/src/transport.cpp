#include "ivy/transport.hpp"

#include <cmath>

#include "httplib.h"

namespace ivy {

std::chrono::milliseconds RetryPolicy::backoff_after(int attempt) const {
  double scale = std::pow(multiplier, attempt - 1);
  return std::chrono::milliseconds(
      static_cast<std::chrono::milliseconds::rep>(static_cast<double>(initial_backoff.count()) * scale));
}

std::chrono::milliseconds RetryPolicy::worst_case_wait() const {
  std::chrono::milliseconds total{0};
  for (int attempt = 1; attempt < max_attempts; ++attempt) total += backoff_after(attempt);
  return total;
}

namespace {

// "https://host:port/v1" -> {"https://host:port", "/v1"}
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

}  // namespace

HttpResponse http_post_json(const std::string& base_url, const std::string& path,
                            const std::string& body,
                            const std::map<std::string, std::string>& headers,
                            std::chrono::milliseconds timeout) {
  auto [origin, prefix] = split_url(base_url);
  httplib::Client client(origin);
  if (!client.is_valid()) {
    throw TransportError(ErrorCode::kTransport, "unsupported endpoint URL " + base_url);
  }
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);
  auto result = client.Post(prefix + path, hdrs, body, "application/json");
  if (!result) {
    throw TransportError(ErrorCode::kTransport,
                         "request to " + base_url + path + " failed: " +
                             httplib::to_string(result.error()));
  }
  HttpResponse out;
  out.status = result->status;
  out.body = result->body;
  if (result->has_header("Retry-After")) {
    try {
      out.retry_after = std::chrono::seconds(std::stoi(result->get_header_value("Retry-After")));
    } catch (const std::exception&) {
      // HTTP-date form; fall back to the policy's own backoff.
    }
  }
  return out;
}

void raise_for_status(const HttpResponse& response, const std::string& what) {
  if (response.status >= 200 && response.status < 300) return;
  std::string msg = what + " returned HTTP " + std::to_string(response.status);
  if (response.status == 429) {
    throw TransportError(ErrorCode::kRateLimited, msg, response.status, response.retry_after);
  }
  if (response.status >= 500 || response.status == 408) {
    throw TransportError(ErrorCode::kTransport, msg, response.status, response.retry_after);
  }
  throw TransportError(ErrorCode::kRejected, msg + ": " + response.body.substr(0, 200),
                       response.status);
}

}  // namespace ivy
