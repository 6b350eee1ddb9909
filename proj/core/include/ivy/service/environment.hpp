#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ivy/embed/embedding.hpp"
#include "ivy/eval/runner.hpp"
#include "ivy/llm/gateway.hpp"
#include "ivy/llm/prompts.hpp"
#include "ivy/pipeline/pipeline.hpp"
#include "ivy/service/config.hpp"

namespace ivy::service {

// Everything a request needs, built once at startup and shared read-only.
struct Environment {
  ServiceConfig config;
  std::shared_ptr<const pipeline::SkillRegistry> skills;
  std::shared_ptr<const llm::Gateway> gateway;
  std::shared_ptr<const llm::PromptLibrary> prompts;
  std::shared_ptr<const embed::EmbeddingProvider> embedder;
  std::shared_ptr<const embed::EmbeddingProvider> eval_embedder;
  std::shared_ptr<pipeline::TraceStore> traces;
  std::shared_ptr<const pipeline::Pipeline> pipeline;
  std::vector<std::string> notes;  // startup observations worth logging

  eval::EvalContext eval_context() const {
    return {*pipeline, *gateway, *prompts, *eval_embedder};
  }
};

struct EnvironmentOptions {
  bool persist_traces = true;   // false keeps traces in memory
  bool persist_indexes = true;  // write rebuilt indexes to index_dir
};

std::shared_ptr<const llm::ChatBackend> make_chat_backend(const ServiceConfig& config);
std::shared_ptr<const embed::EmbeddingProvider> make_embedder(const EmbeddingConfig& config,
                                                              const RetryPolicy& retry);

// Every *.tmk file in the model directory, parsed and validated, in file
// name order. Throws kValidation listing every file that fails.
std::vector<tmk::ValidatedModel> load_models(const std::filesystem::path& model_dir);

// Corpus for one skill and mode; baseline reads `<text_dir>/<skill>.txt`.
// Throws kNotFound when the baseline text is missing.
docs::Corpus build_corpus(const tmk::ValidatedModel& model, docs::CorpusMode mode,
                          const ServiceConfig& config);

// Loads `<index_dir>/<skill>/<mode>` when it matches the freshly built
// corpus and the embedder; otherwise rebuilds (and saves when `persist`).
pipeline::SkillIndex ensure_index(const tmk::ValidatedModel& model, docs::CorpusMode mode,
                                  const ServiceConfig& config,
                                  const embed::EmbeddingProvider& embedder, bool persist,
                                  std::vector<std::string>* notes = nullptr);

// Throws kValidation when no model loads, kConfig for bad settings.
std::shared_ptr<Environment> load_environment(ServiceConfig config, EnvironmentOptions options = {});

}  // namespace ivy::service
