#include "ivy/service/environment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ivy/error.hpp"
#include "ivy/llm/scripted_mock.hpp"
#include "ivy/tmk/parser.hpp"

namespace ivy::service {

namespace {

std::string require_key(const std::string& env_name, const char* what) {
  auto key = env(env_name);
  if (!key) {
    throw Error(ErrorCode::kConfig,
                std::string(what) + " uses the remote backend but $" + env_name + " is not set");
  }
  return *key;
}

}  // namespace

std::shared_ptr<const llm::ChatBackend> make_chat_backend(const ServiceConfig& config) {
  const auto& g = config.gateway;
  if (g.backend == "mock") {
    if (g.mock_script.empty()) {
      return std::make_shared<llm::ScriptedMock>(std::vector<llm::ScriptedMock::Rule>{});
    }
    return llm::ScriptedMock::from_file(g.mock_script);
  }
  llm::RemoteChatConfig remote;
  remote.base_url = g.base_url;
  remote.model = g.model;
  remote.api_key = require_key(g.api_key_env, "gateway");
  remote.timeout = g.timeout;
  return std::make_shared<llm::HttpChatBackend>(remote);
}

std::shared_ptr<const embed::EmbeddingProvider> make_embedder(const EmbeddingConfig& config,
                                                              const RetryPolicy& retry) {
  auto kind = embed::provider_kind_from(config.provider);
  if (kind == embed::ProviderKind::kDeterministicMock) {
    return std::make_shared<embed::HashEmbedder>(config.dim);
  }
  embed::RemoteEmbeddingConfig remote;
  remote.base_url = config.base_url;
  remote.model = config.model;
  remote.api_key = require_key(config.api_key_env, "embedding");
  remote.dim = config.dim;
  remote.timeout = config.timeout;
  remote.retry = retry;
  return std::make_shared<embed::HttpEmbedder>(remote);
}

std::vector<tmk::ValidatedModel> load_models(const std::filesystem::path& model_dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(model_dir, ec)) {
    throw Error(ErrorCode::kConfig, "model directory " + model_dir.string() + " does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(model_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tmk") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<tmk::ValidatedModel> models;
  std::vector<std::string> failures;
  for (const auto& file : files) {
    try {
      models.push_back(tmk::ValidatedModel::from(tmk::load_tmk_file(file.string())));
    } catch (const Error& e) {
      failures.push_back(file.filename().string() + ": " + e.what());
    }
  }
  if (!failures.empty()) {
    std::string message = "invalid skill models:";
    for (const auto& f : failures) message += "\n  " + f;
    throw Error(ErrorCode::kValidation, message);
  }
  return models;
}

docs::Corpus build_corpus(const tmk::ValidatedModel& model, docs::CorpusMode mode,
                          const ServiceConfig& config) {
  if (mode == docs::CorpusMode::kTmk) return docs::render_documents(model);
  auto path = config.text_dir / (model->skill_id + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "no baseline text " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return docs::chunk_text(buf.str(), model->skill_id, config.chunk);
}

pipeline::SkillIndex ensure_index(const tmk::ValidatedModel& model, docs::CorpusMode mode,
                                  const ServiceConfig& config,
                                  const embed::EmbeddingProvider& embedder, bool persist,
                                  std::vector<std::string>* notes) {
  auto corpus = build_corpus(model, mode, config);
  auto dir = config.index_dir / model->skill_id / std::string(docs::to_string(mode));
  std::error_code ec;
  if (std::filesystem::exists(dir / "header.json", ec)) {
    try {
      auto loaded = embed::load_index(dir);
      if (loaded.corpus == corpus && loaded.index.dim() == embedder.dim() &&
          loaded.index.provider_kind() == embedder.kind()) {
        return {std::move(loaded.corpus), std::move(loaded.index)};
      }
      if (notes) notes->push_back("index " + dir.string() + " is stale; rebuilding");
    } catch (const Error& e) {
      if (notes) notes->push_back("index " + dir.string() + " unreadable (" + e.what() + "); rebuilding");
    }
  }
  auto index = embed::build_index(corpus, embedder);
  if (persist) embed::save_index(dir, corpus, index);
  return {std::move(corpus), std::move(index)};
}

std::shared_ptr<Environment> load_environment(ServiceConfig config, EnvironmentOptions options) {
  auto envr = std::make_shared<Environment>();
  envr->config = std::move(config);
  const auto& c = envr->config;

  auto prompts = std::make_shared<llm::PromptLibrary>(llm::PromptLibrary::load(c.prompt_dir));
  auto gateway = std::make_shared<llm::Gateway>(make_chat_backend(c), c.retry);
  auto embedder = make_embedder(c.embedding, c.retry);
  auto eval_embedder = make_embedder(c.eval_embedding, c.retry);

  auto models = load_models(c.model_dir);
  if (models.empty()) {
    throw Error(ErrorCode::kValidation, "no skill models in " + c.model_dir.string());
  }
  auto registry = std::make_shared<pipeline::SkillRegistry>();
  for (auto& model : models) {
    std::string id = model->skill_id;
    for (auto mode : {docs::CorpusMode::kTmk, docs::CorpusMode::kBaseline}) {
      try {
        auto built = ensure_index(model, mode, c, *embedder, options.persist_indexes, &envr->notes);
        if (mode == docs::CorpusMode::kTmk) registry->add(model);
        registry->set_index(id, mode, std::move(built.corpus), std::move(built.index));
      } catch (const Error& e) {
        if (mode == docs::CorpusMode::kTmk || e.code() != ErrorCode::kNotFound) throw;
        envr->notes.push_back("skill " + id + " has no baseline text; baseline mode disabled");
      }
    }
  }

  envr->traces = options.persist_traces ? std::make_shared<pipeline::TraceStore>(c.trace_dir)
                                        : std::make_shared<pipeline::TraceStore>();
  pipeline::PipelineConfig pc;
  pc.optimizer.blacklist = c.blacklist;
  pc.kscore_fallback = c.kscore_fallback;
  envr->skills = registry;
  envr->gateway = gateway;
  envr->prompts = prompts;
  envr->embedder = embedder;
  envr->eval_embedder = eval_embedder;
  envr->pipeline = std::make_shared<pipeline::Pipeline>(registry, gateway, prompts, embedder, pc,
                                                        envr->traces);
  return envr;
}

}  // namespace ivy::service
