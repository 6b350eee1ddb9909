#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivy/docs/corpus.hpp"
#include "ivy/embed/index.hpp"
#include "ivy/llm/gateway.hpp"
#include "ivy/llm/prompts.hpp"
#include "ivy/pipeline/stages.hpp"
#include "ivy/pipeline/trace.hpp"
#include "ivy/tmk/validate.hpp"

namespace ivy::pipeline {

struct SkillIndex {
  docs::Corpus corpus;
  embed::VectorIndex index;
};

struct SkillEntry {
  tmk::ValidatedModel model;
  std::map<docs::CorpusMode, SkillIndex> indexes;
};

// Loaded skills and their per-mode indexes. Built once, then shared
// read-only between concurrent pipelines.
class SkillRegistry {
 public:
  // Throws kInvalidArgument when the skill id is already registered.
  void add(tmk::ValidatedModel model);

  // Throws kNotFound for an unregistered skill, kInvalidArgument when the
  // corpus belongs to another skill or mode.
  void set_index(std::string_view skill_id, docs::CorpusMode mode, docs::Corpus corpus,
                 embed::VectorIndex index);

  const SkillEntry* find(std::string_view skill_id) const;
  std::vector<std::string> skill_ids() const;
  bool empty() const { return skills_.empty(); }

 private:
  std::map<std::string, SkillEntry, std::less<>> skills_;
};

struct PipelineConfig {
  OptimizerOptions optimizer;
  int kscore_fallback = 2;
};

struct AnsweredQuestion {
  std::string final_response;
  std::string trace_id;
};

// Composes the stages into one answer and records the knowledge trace.
// Holds only shared immutable state, so one instance may serve concurrent
// callers.
class Pipeline {
 public:
  Pipeline(std::shared_ptr<const SkillRegistry> skills, std::shared_ptr<const llm::Gateway> gateway,
           std::shared_ptr<const llm::PromptLibrary> prompts,
           std::shared_ptr<const embed::EmbeddingProvider> embedder, PipelineConfig config = {},
           std::shared_ptr<TraceStore> traces = nullptr);

  // Runs every stage and stores the trace. Throws kInvalidArgument for an
  // empty question and kNotFound for an unknown skill or missing index. A
  // failing gateway call stores the partial trace, then rethrows.
  KnowledgeTrace run(std::string_view question, std::string_view skill_id,
                     docs::CorpusMode mode) const;

  AnsweredQuestion answer(std::string_view question, std::string_view skill_id,
                          docs::CorpusMode mode) const;

  const SkillRegistry& skills() const noexcept { return *skills_; }
  const std::shared_ptr<TraceStore>& traces() const noexcept { return traces_; }
  const PipelineConfig& config() const noexcept { return config_; }

 private:
  std::shared_ptr<const SkillRegistry> skills_;
  std::shared_ptr<const llm::Gateway> gateway_;
  std::shared_ptr<const llm::PromptLibrary> prompts_;
  std::shared_ptr<const embed::EmbeddingProvider> embedder_;
  PipelineConfig config_;
  std::shared_ptr<TraceStore> traces_;
};

}  // namespace ivy::pipeline
