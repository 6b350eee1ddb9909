#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ivy/embed/embedding.hpp"
#include "ivy/embed/index.hpp"
#include "ivy/llm/gateway.hpp"
#include "ivy/llm/prompts.hpp"
#include "ivy/llm/scripted_mock.hpp"
#include "ivy/pipeline/pipeline.hpp"
#include "ivy/tmk/model.hpp"
#include "ivy/tmk/parser.hpp"
#include "ivy/tmk/validate.hpp"

namespace ivy::testing {

inline std::filesystem::path source_dir() { return IVY_SOURCE_DIR; }
inline std::filesystem::path source_path(const std::string& rel) { return source_dir() / rel; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ivy-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline tmk::ValidatedModel load_model(const std::string& rel) {
  return tmk::ValidatedModel::from(tmk::load_tmk_file(source_path(rel).string()));
}

inline tmk::ValidatedModel planning_model() {
  return load_model("data/models/partial-order-planning.tmk");
}

inline tmk::ValidatedModel sorting_model() { return load_model("data/models/sorting.tmk"); }

// Both shipped models plus the reduced verification models, sorted by id.
inline std::vector<tmk::ValidatedModel> all_models() {
  std::vector<std::filesystem::path> files;
  for (const char* dir : {"data/models", "fixtures/verification-models"}) {
    for (const auto& e : std::filesystem::directory_iterator(source_path(dir))) {
      if (e.path().extension() == ".tmk") files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  std::vector<tmk::ValidatedModel> out;
  for (const auto& f : files) out.push_back(tmk::ValidatedModel::from(tmk::load_tmk_file(f.string())));
  return out;
}

inline std::shared_ptr<const llm::PromptLibrary> shipped_prompts() {
  return std::make_shared<llm::PromptLibrary>(llm::PromptLibrary::load(source_path("prompts")));
}

inline std::shared_ptr<const llm::ChatBackend> mock_script(const std::string& name) {
  return llm::ScriptedMock::from_file(source_path("fixtures/mock/" + name + ".json"));
}

inline std::shared_ptr<const llm::ChatBackend> mock_rules(std::vector<llm::ScriptedMock::Rule> rules,
                                                          std::string fallback = "unscripted") {
  return std::make_shared<llm::ScriptedMock>(std::move(rules), std::move(fallback));
}

inline void no_sleep(std::chrono::milliseconds) {}

// A pipeline over the given models with every mode indexed from the model
// (TMK) and, when present, from the shipped lesson text (baseline).
struct PipelineRig {
  std::shared_ptr<pipeline::SkillRegistry> skills = std::make_shared<pipeline::SkillRegistry>();
  std::shared_ptr<const llm::Gateway> gateway;
  std::shared_ptr<const llm::PromptLibrary> prompts = shipped_prompts();
  std::shared_ptr<const embed::EmbeddingProvider> embedder =
      std::make_shared<embed::HashEmbedder>();
  std::shared_ptr<pipeline::TraceStore> traces = std::make_shared<pipeline::TraceStore>();
  std::shared_ptr<pipeline::Pipeline> pipeline;

  PipelineRig(std::shared_ptr<const llm::ChatBackend> backend,
              std::vector<tmk::ValidatedModel> models, pipeline::PipelineConfig config = {}) {
    gateway = std::make_shared<llm::Gateway>(std::move(backend), RetryPolicy{}, no_sleep);
    for (auto& model : models) {
      std::string id = model->skill_id;
      skills->add(model);
      auto corpus = docs::render_documents(model);
      auto index = embed::build_index(corpus, *embedder);
      skills->set_index(id, docs::CorpusMode::kTmk, std::move(corpus), std::move(index));
      auto text = source_path("data/texts/" + id + ".txt");
      if (std::filesystem::exists(text)) {
        auto chunks = docs::chunk_text(read_file(text), id);
        auto chunk_index = embed::build_index(chunks, *embedder);
        skills->set_index(id, docs::CorpusMode::kBaseline, std::move(chunks),
                          std::move(chunk_index));
      }
    }
    pipeline = std::make_shared<pipeline::Pipeline>(skills, gateway, prompts, embedder, config,
                                                    traces);
  }
};

}  // namespace ivy::testing
