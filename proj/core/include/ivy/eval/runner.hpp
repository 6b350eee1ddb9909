#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ivy/embed/embedding.hpp"
#include "ivy/eval/judges.hpp"
#include "ivy/eval/suite.hpp"
#include "ivy/pipeline/pipeline.hpp"

namespace ivy::eval {

struct EvalOptions {
  std::size_t repeats = 1;
  docs::CorpusMode mode = docs::CorpusMode::kTmk;
  std::size_t workers = 1;
  // Skill that cannot-answer and inactive questions are asked against.
  // Empty selects the first loaded skill id.
  std::string host_skill;
};

struct EvalRow {
  std::string question_id;
  std::size_t repeat = 0;  // 0-based
  QuestionCategory category = QuestionCategory::kTask;
  std::optional<std::string> skill_id;
  std::string asked_skill;
  // false when the question's skill is not loaded; such rows still run but
  // are left out of every aggregate.
  bool active = true;
  std::optional<std::string> trace_id;
  bool refused = false;
  bool relevance_correct = false;
  std::optional<bool> top1_kind_match;
  std::optional<int> kscore;
  std::size_t retrieved = 0;
  std::string final_response;
  std::optional<double> similarity;
  std::optional<GroundingVerdict> grounding;
  std::optional<RetentionVerdict> retention;
  std::optional<std::string> error;
};

// Count, mean and population standard deviation; mean and stddev are empty
// when there are no samples.
struct Stat {
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> stddev;

  static Stat of(const std::vector<double>& xs);
};

struct GroupTally {
  std::size_t rows = 0;
  std::size_t scored = 0;
  std::size_t relevance_correct = 0;
  std::size_t refusals = 0;
};

struct EvalReport {
  std::string suite_name;
  docs::CorpusMode mode = docs::CorpusMode::kTmk;
  std::size_t repeats = 0;
  std::vector<EvalRow> rows;  // question order, then repeat order

  std::size_t trace_count = 0;
  std::size_t scored_rows = 0;
  std::size_t inactive_rows = 0;
  std::size_t error_rows = 0;
  std::size_t refusals = 0;
  std::optional<double> relevance_accuracy;
  std::optional<double> correct_component_rate;
  Stat similarity;
  Stat derived_fraction;
  Stat retained_fraction;
  std::size_t invalid_grounding = 0;
  std::size_t invalid_retention = 0;
  std::map<std::string, GroupTally> by_category;
  std::map<std::string, GroupTally> by_skill;

  std::string to_json(int indent = 2) const;
  std::string summary() const;
};

struct EvalContext {
  const pipeline::Pipeline& pipeline;
  const llm::Gateway& judge_gateway;
  const llm::PromptLibrary& prompts;
  const embed::EmbeddingProvider& eval_embedder;
};

// Runs |suite| x repeats answers on a bounded worker pool, judges and
// scores each, then reduces the rows in order. Per-row failures are
// recorded on the row and the run continues. Throws kInvalidArgument for
// repeats == 0 and kNotFound when no host skill is available.
EvalReport run_eval(const EvalContext& ctx, const Suite& suite, const EvalOptions& options);

// Aggregates only; exposed so tests can reduce hand-built rows.
EvalReport reduce_rows(std::string suite_name, docs::CorpusMode mode, std::size_t repeats,
                       std::vector<EvalRow> rows);

}  // namespace ivy::eval
