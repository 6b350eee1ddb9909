#pragma once

#include <memory>
#include <string>

#include "ivy/service/environment.hpp"

namespace ivy::service {

// HTTP status for an error code: 400 for bad input, 404 for unknown
// resources, 502 for upstream model failures, 500 otherwise.
int http_status_for(ErrorCode code);

// JSON API over one Environment. Endpoints:
//   GET  /api/health
//   GET  /api/skills
//   GET  /api/skills/{id}
//   POST /api/skills/{id}/ask     {"question", "mode"?}
//   GET  /api/traces/{id}
//   POST /api/eval                {"suite_ref", "repeats"?, "mode"?}
// Errors: {"error": {"code": "<error code>", "message": "..."}}.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<const Environment> env);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds the address; port 0 picks a free port. Returns the bound port.
  // Throws kConfig when binding fails.
  int bind(const std::string& host, int port);

  // Serves until stop(); in-flight requests finish before it returns.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ivy::service
