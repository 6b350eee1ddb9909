#include "ivy/service/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ivy/error.hpp"

namespace ivy::service {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

void read_embedding(const json& in, EmbeddingConfig& out) {
  out.provider = in.value("provider", out.provider);
  out.dim = in.value("dim", out.dim);
  out.base_url = in.value("base_url", out.base_url);
  out.model = in.value("model", out.model);
  out.api_key_env = in.value("api_key_env", out.api_key_env);
  out.timeout = std::chrono::milliseconds(in.value("timeout_ms", out.timeout.count()));
}

}  // namespace

ServiceConfig ServiceConfig::from_json(std::string_view text, const std::filesystem::path& base_dir) {
  ServiceConfig c;
  try {
    auto in = json::parse(text);
    if (!in.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
    auto path = [&](const char* key, std::filesystem::path& field) {
      if (in.contains(key)) field = in.at(key).get<std::string>();
    };
    path("model_dir", c.model_dir);
    path("index_dir", c.index_dir);
    path("trace_dir", c.trace_dir);
    path("prompt_dir", c.prompt_dir);
    path("text_dir", c.text_dir);
    path("suite_dir", c.suite_dir);
    if (in.contains("gateway")) {
      const auto& g = in.at("gateway");
      c.gateway.backend = g.value("backend", c.gateway.backend);
      if (g.contains("mock_script")) c.gateway.mock_script = g.at("mock_script").get<std::string>();
      c.gateway.base_url = g.value("base_url", c.gateway.base_url);
      c.gateway.model = g.value("model", c.gateway.model);
      c.gateway.api_key_env = g.value("api_key_env", c.gateway.api_key_env);
      c.gateway.timeout = std::chrono::milliseconds(g.value("timeout_ms", c.gateway.timeout.count()));
    }
    if (in.contains("embedding")) read_embedding(in.at("embedding"), c.embedding);
    c.eval_embedding = c.embedding;
    if (in.contains("eval_embedding")) read_embedding(in.at("eval_embedding"), c.eval_embedding);
    if (in.contains("retry")) {
      const auto& r = in.at("retry");
      c.retry.max_attempts = r.value("max_attempts", c.retry.max_attempts);
      c.retry.initial_backoff =
          std::chrono::milliseconds(r.value("initial_backoff_ms", c.retry.initial_backoff.count()));
      c.retry.multiplier = r.value("multiplier", c.retry.multiplier);
    }
    if (in.contains("blacklist")) c.blacklist = in.at("blacklist").get<std::vector<std::string>>();
    c.kscore_fallback = in.value("kscore_fallback", c.kscore_fallback);
    c.workers = in.value("workers", c.workers);
    c.listen = in.value("listen", c.listen);
    if (in.contains("chunk")) {
      c.chunk.chunk_size = in.at("chunk").value("size", c.chunk.chunk_size);
      c.chunk.overlap = in.at("chunk").value("overlap", c.chunk.overlap);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed config: ") + e.what());
  }
  for (auto* p : {&c.model_dir, &c.index_dir, &c.trace_dir, &c.prompt_dir, &c.text_dir,
                  &c.suite_dir, &c.gateway.mock_script}) {
    *p = resolve(base_dir, *p);
  }
  if (c.gateway.backend != "mock" && c.gateway.backend != "remote") {
    throw Error(ErrorCode::kConfig, "gateway.backend must be \"mock\" or \"remote\"");
  }
  if (c.retry.max_attempts < 1) throw Error(ErrorCode::kConfig, "retry.max_attempts must be >= 1");
  if (c.kscore_fallback < 1 || c.kscore_fallback > 4) {
    throw Error(ErrorCode::kConfig, "kscore_fallback must be in [1, 4]");
  }
  if (c.workers == 0) throw Error(ErrorCode::kConfig, "workers must be positive");
  if (c.chunk.chunk_size <= c.chunk.overlap) {
    throw Error(ErrorCode::kConfig, "chunk.size must exceed chunk.overlap");
  }
  parse_listen(c.listen);
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto base = std::filesystem::absolute(path).parent_path();
  try {
    return from_json(buf.str(), base);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void ServiceConfig::apply_environment() {
  if (auto v = env("IVY_LISTEN")) {
    parse_listen(*v);
    listen = *v;
  }
}

ListenAddress parse_listen(std::string_view listen) {
  auto colon = listen.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == listen.size()) {
    throw Error(ErrorCode::kConfig, "listen address must be host:port, got '" + std::string(listen) + "'");
  }
  ListenAddress out;
  out.host = std::string(listen.substr(0, colon));
  try {
    std::size_t used = 0;
    auto port_text = std::string(listen.substr(colon + 1));
    out.port = std::stoi(port_text, &used);
    if (used != port_text.size() || out.port < 0 || out.port > 65535) throw std::out_of_range("port");
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kConfig, "bad port in listen address '" + std::string(listen) + "'");
  }
  return out;
}

std::optional<std::string> env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace ivy::service
