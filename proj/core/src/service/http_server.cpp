#include "ivy/service/http_server.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "ivy/error.hpp"

namespace ivy::service {

using nlohmann::json;

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kValidation:
    case ErrorCode::kDimensionMismatch:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kTransport:
    case ErrorCode::kRateLimited:
    case ErrorCode::kEmptyCompletion:
    case ErrorCode::kRejected:
      return 502;
    case ErrorCode::kIo:
    case ErrorCode::kConfig:
      return 500;
  }
  return 500;
}

namespace {

json skill_json(const pipeline::SkillEntry& entry, bool detail) {
  const auto& m = entry.model.model();
  json modes = json::array();
  for (const auto& [mode, idx] : entry.indexes) modes.push_back(std::string(docs::to_string(mode)));
  json out = {{"skill_id", m.skill_id},
              {"name", m.skill_name},
              {"tasks", m.tasks.size()},
              {"methods", m.methods.size()},
              {"concepts", m.knowledge.concepts.size()},
              {"modes", modes}};
  if (detail) {
    out["root_tasks"] = m.root_tasks;
    out["hierarchy_depth"] = tmk::hierarchy_depth(entry.model);
    json components = json::array();
    if (auto it = entry.indexes.find(docs::CorpusMode::kTmk); it != entry.indexes.end()) {
      for (const auto& d : it->second.corpus.documents) {
        components.push_back({{"doc_id", d.doc_id},
                              {"kind", std::string(docs::to_string(d.kind))},
                              {"name", d.component_name}});
      }
    }
    out["components"] = components;
  }
  return out;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  send_json(res, http_status_for(code),
            {{"error", {{"code", std::string(to_string(code))}, {"message", message}}}});
}

json parse_body(const httplib::Request& req) {
  try {
    auto body = json::parse(req.body);
    if (!body.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
    return body;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed request body: ") + e.what());
  }
}

std::string string_field(const json& body, const char* key, std::string fallback = {}) {
  if (!body.contains(key)) return fallback;
  if (!body.at(key).is_string()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("field '") + key + "' must be a string");
  }
  return body.at(key).get<std::string>();
}

std::filesystem::path suite_path(const ServiceConfig& config, const std::string& ref) {
  if (ref.empty() || ref.find('/') != std::string::npos || ref.find('\\') != std::string::npos ||
      ref.find("..") != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "suite_ref must be a suite name, got '" + ref + "'");
  }
  auto path = config.suite_dir / ref;
  if (path.extension() != ".json") path += ".json";
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kNotFound, "no suite named '" + ref + "'");
  }
  return path;
}

}  // namespace

struct HttpServer::Impl {
  std::shared_ptr<const Environment> env;
  httplib::Server server;

  template <typename Handler>
  auto guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        send_error(res, e.code(), e.what());
      } catch (const std::exception& e) {
        send_error(res, ErrorCode::kIo, e.what());
      }
    };
  }

  void routes() {
    server.Get("/api/health", guarded([this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200,
                {{"status", "ok"},
                 {"skills", env->skills->skill_ids().size()},
                 {"backend", std::string(llm::to_string(env->gateway->backend_kind()))}});
    }));

    server.Get("/api/skills", guarded([this](const httplib::Request&, httplib::Response& res) {
      json skills = json::array();
      for (const auto& id : env->skills->skill_ids()) {
        skills.push_back(skill_json(*env->skills->find(id), false));
      }
      send_json(res, 200, {{"skills", skills}});
    }));

    server.Get(R"(/api/skills/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto* entry = env->skills->find(req.matches[1].str());
                 if (!entry) {
                   throw Error(ErrorCode::kNotFound, "unknown skill '" + req.matches[1].str() + "'");
                 }
                 send_json(res, 200, skill_json(*entry, true));
               }));

    server.Post(R"(/api/skills/([^/]+)/ask)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto body = parse_body(req);
                  auto question = string_field(body, "question");
                  auto mode = docs::corpus_mode_from(string_field(body, "mode", "tmk"));
                  auto answered = env->pipeline->answer(question, req.matches[1].str(), mode);
                  send_json(res, 200,
                            {{"final_response", answered.final_response},
                             {"trace_id", answered.trace_id}});
                }));

    server.Get(R"(/api/traces/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto trace = env->traces->get(req.matches[1].str());
                 if (!trace) {
                   throw Error(ErrorCode::kNotFound, "unknown trace '" + req.matches[1].str() + "'");
                 }
                 res.status = 200;
                 res.set_content(trace->to_json(), "application/json");
               }));

    server.Post("/api/eval", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto body = parse_body(req);
      auto suite = eval::Suite::load(suite_path(env->config, string_field(body, "suite_ref")));
      eval::EvalOptions options;
      if (body.contains("repeats")) {
        if (!body.at("repeats").is_number_integer() || body.at("repeats").get<long long>() < 1) {
          throw Error(ErrorCode::kInvalidArgument, "repeats must be a positive integer");
        }
        options.repeats = body.at("repeats").get<std::size_t>();
      }
      options.mode = docs::corpus_mode_from(string_field(body, "mode", "tmk"));
      options.workers = env->config.workers;
      auto report = eval::run_eval(env->eval_context(), suite, options);
      res.status = 200;
      res.set_content(report.to_json(), "application/json");
    }));
  }
};

HttpServer::HttpServer(std::shared_ptr<const Environment> env) : impl_(std::make_unique<Impl>()) {
  if (!env) throw Error(ErrorCode::kConfig, "server needs an environment");
  impl_->env = std::move(env);
  auto workers = std::max<std::size_t>(impl_->env->config.workers, 1);
  impl_->server.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
  impl_->server.set_payload_max_length(1 << 20);
  // httplib's default adds SO_REUSEPORT, which lets two servers share a port.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  impl_->server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.body.empty() && res.status == 404) {
      send_error(res, ErrorCode::kNotFound, "no route for " + req.method + " " + req.path);
    }
  });
  impl_->routes();
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorCode::kConfig, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::kConfig, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace ivy::service
