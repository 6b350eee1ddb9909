#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivy/docs/corpus.hpp"
#include "ivy/transport.hpp"

namespace ivy::service {

struct GatewayConfig {
  std::string backend = "mock";  // "mock" | "remote"
  std::filesystem::path mock_script;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "IVY_API_KEY";
  std::chrono::milliseconds timeout{60000};
};

struct EmbeddingConfig {
  std::string provider = "mock";  // "mock" | "remote"
  std::size_t dim = 64;
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "text-embedding-3-small";
  std::string api_key_env = "IVY_API_KEY";
  std::chrono::milliseconds timeout{30000};
};

// Service configuration file (JSON). Relative paths are resolved against
// the directory holding the file. See docs/file-formats.md.
struct ServiceConfig {
  std::filesystem::path model_dir = "data/models";
  std::filesystem::path index_dir = "var/indexes";
  std::filesystem::path trace_dir = "var/traces";
  std::filesystem::path prompt_dir = "prompts";
  std::filesystem::path text_dir = "data/texts";
  std::filesystem::path suite_dir = "suites";
  GatewayConfig gateway;
  EmbeddingConfig embedding;
  EmbeddingConfig eval_embedding;
  RetryPolicy retry;
  std::vector<std::string> blacklist = {"based on the previous information",
                                        "as mentioned earlier", "in the previous response"};
  int kscore_fallback = 2;
  std::size_t workers = 4;
  std::string listen = "127.0.0.1:8080";
  docs::ChunkOptions chunk;

  // Throws kConfig on malformed content.
  static ServiceConfig from_json(std::string_view json, const std::filesystem::path& base_dir);
  static ServiceConfig load(const std::filesystem::path& path);

  // IVY_LISTEN replaces `listen`.
  void apply_environment();
};

struct ListenAddress {
  std::string host;
  int port = 0;
};

// "host:port"; throws kConfig when malformed.
ListenAddress parse_listen(std::string_view listen);

// Value of the named environment variable, when set and non-empty.
std::optional<std::string> env(const std::string& name);

}  // namespace ivy::service
