#include "ivy/pipeline/pipeline.hpp"

#include "ivy/error.hpp"
#include "ivy/text.hpp"

namespace ivy::pipeline {

void SkillRegistry::add(tmk::ValidatedModel model) {
  std::string id = model->skill_id;
  if (skills_.count(id)) throw Error(ErrorCode::kInvalidArgument, "skill " + id + " already loaded");
  skills_.emplace(id, SkillEntry{std::move(model), {}});
}

void SkillRegistry::set_index(std::string_view skill_id, docs::CorpusMode mode, docs::Corpus corpus,
                              embed::VectorIndex index) {
  auto it = skills_.find(skill_id);
  if (it == skills_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown skill '" + std::string(skill_id) + "'");
  }
  if (corpus.skill_id != skill_id || corpus.mode != mode) {
    throw Error(ErrorCode::kInvalidArgument,
                "corpus for " + corpus.skill_id + "/" + std::string(docs::to_string(corpus.mode)) +
                    " does not belong to " + std::string(skill_id) + "/" +
                    std::string(docs::to_string(mode)));
  }
  if (corpus.size() != index.size()) {
    throw Error(ErrorCode::kInvalidArgument, "index and corpus sizes differ for " +
                                                 std::string(skill_id));
  }
  it->second.indexes.insert_or_assign(mode, SkillIndex{std::move(corpus), std::move(index)});
}

const SkillEntry* SkillRegistry::find(std::string_view skill_id) const {
  auto it = skills_.find(skill_id);
  return it == skills_.end() ? nullptr : &it->second;
}

std::vector<std::string> SkillRegistry::skill_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, entry] : skills_) ids.push_back(id);
  return ids;
}

Pipeline::Pipeline(std::shared_ptr<const SkillRegistry> skills,
                   std::shared_ptr<const llm::Gateway> gateway,
                   std::shared_ptr<const llm::PromptLibrary> prompts,
                   std::shared_ptr<const embed::EmbeddingProvider> embedder, PipelineConfig config,
                   std::shared_ptr<TraceStore> traces)
    : skills_(std::move(skills)),
      gateway_(std::move(gateway)),
      prompts_(std::move(prompts)),
      embedder_(std::move(embedder)),
      config_(std::move(config)),
      traces_(std::move(traces)) {
  if (!skills_ || !gateway_ || !prompts_ || !embedder_) {
    throw Error(ErrorCode::kConfig, "pipeline is missing a component");
  }
  if (config_.kscore_fallback < KScore::kMin || config_.kscore_fallback > KScore::kMax) {
    throw Error(ErrorCode::kConfig, "kscore_fallback must be in [1, 4]");
  }
}

KnowledgeTrace Pipeline::run(std::string_view question, std::string_view skill_id,
                             docs::CorpusMode mode) const {
  if (text::trim(question).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "question must be non-empty");
  }
  const SkillEntry* skill = skills_->find(skill_id);
  if (!skill) throw Error(ErrorCode::kNotFound, "unknown skill '" + std::string(skill_id) + "'");
  auto idx = skill->indexes.find(mode);
  if (idx == skill->indexes.end()) {
    throw Error(ErrorCode::kNotFound, "skill '" + std::string(skill_id) + "' has no " +
                                          std::string(docs::to_string(mode)) + " index");
  }
  const SkillIndex& active = idx->second;

  KnowledgeTrace trace;
  trace.trace_id = new_trace_id();
  trace.skill_id = std::string(skill_id);
  trace.question = std::string(question);
  trace.mode = mode;
  trace.started_at = utc_now_iso();

  llm::CallLog log;
  StageContext ctx{*gateway_, *prompts_, &log, &trace.diagnostics};
  auto refusal = [&] { return prompts_->render("refusal", {{"skill", skill->model->skill_name}}); };

  auto finish = [&] {
    trace.llm_calls = log.snapshot();
    trace.finished_at = utc_now_iso();
    if (traces_) traces_->put(trace);
  };

  try {
    trace.verdict = assess_relevance(ctx, question, skill->model);
    if (!trace.verdict.relevant) {
      trace.final_response = refusal();
      finish();
      return trace;
    }
    auto complexity = assess_complexity(ctx, question, KScore(config_.kscore_fallback));
    trace.kscore = complexity.kscore;
    trace.kscore_fallback = complexity.fallback;

    auto hits = retrieve(question, active.index, *embedder_, complexity.kscore);
    if (hits.empty()) {
      trace.diagnostics.push_back("index for " + trace.skill_id + "/" +
                                  std::string(docs::to_string(mode)) +
                                  " is empty; answered with refusal");
      trace.final_response = refusal();
      finish();
      return trace;
    }
    std::vector<const docs::TmkDocument*> docs;
    for (const auto& hit : hits) {
      const docs::TmkDocument* doc = active.corpus.find(hit.doc_id);
      if (!doc) throw Error(ErrorCode::kNotFound, "index entry " + hit.doc_id + " not in corpus");
      docs.push_back(doc);
      trace.retrieved.push_back({doc->doc_id, doc->component_name, doc->kind, hit.score});
    }
    generate_response(ctx, question, docs, trace.intermediate_responses);
    trace.final_response = optimize_response(ctx, question, trace.intermediate_responses.back(),
                                             complexity.kscore, config_.optimizer);
  } catch (const Error& e) {
    trace.error = std::string(to_string(e.code())) + ": " + e.what();
    finish();
    throw;
  }
  finish();
  return trace;
}

AnsweredQuestion Pipeline::answer(std::string_view question, std::string_view skill_id,
                                  docs::CorpusMode mode) const {
  auto trace = run(question, skill_id, mode);
  return {trace.final_response, trace.trace_id};
}

}  // namespace ivy::pipeline
