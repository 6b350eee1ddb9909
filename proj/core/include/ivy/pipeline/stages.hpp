#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivy/docs/corpus.hpp"
#include "ivy/embed/index.hpp"
#include "ivy/llm/gateway.hpp"
#include "ivy/llm/prompts.hpp"
#include "ivy/pipeline/trace.hpp"
#include "ivy/tmk/validate.hpp"

// The individual answer stages. Each takes a StageContext so its gateway
// calls land in the caller's call log.
namespace ivy::pipeline {

struct StageContext {
  const llm::Gateway& gateway;
  const llm::PromptLibrary& prompts;
  llm::CallLog* log = nullptr;
  std::vector<std::string>* diagnostics = nullptr;
};

// Names shown to the relevance gate: skill name, then task, method and
// concept names in model order, without duplicates.
std::vector<std::string> component_names(const tmk::TmkModel& model);

// Parses "RELEVANT: yes|no / MATCHES: a; b / RATIONALE: ..." replies. A
// "yes" without matches is rejected.
std::optional<RelevanceVerdict> parse_relevance(std::string_view completion);

// Empty question throws kInvalidArgument. An unparseable reply is retried
// once with the reprompt suffix; a second failure yields relevant=false.
RelevanceVerdict assess_relevance(const StageContext& ctx, std::string_view question,
                                  const tmk::ValidatedModel& model);

// Integer 1..4, optionally followed by a period.
std::optional<KScore> parse_kscore(std::string_view completion);

struct Complexity {
  KScore kscore;
  bool fallback = false;
};

Complexity assess_complexity(const StageContext& ctx, std::string_view question,
                             KScore fallback = KScore(2));

// Top min(k, |index|) documents. Empty index gives an empty result.
std::vector<embed::ScoredDoc> retrieve(std::string_view question, const embed::VectorIndex& index,
                                       const embed::EmbeddingProvider& embedder, KScore kscore);

// Generates from docs[0], then refines with docs[1..]. Each intermediate is
// appended to `out` as soon as it exists, so a failing call leaves the
// finished steps in place.
void generate_response(const StageContext& ctx, std::string_view question,
                       const std::vector<const docs::TmkDocument*>& docs,
                       std::vector<std::string>& out);

struct OptimizerOptions {
  std::vector<std::string> blacklist = {"based on the previous information",
                                        "as mentioned earlier", "in the previous response"};
};

// Blacklisted phrases present in `text`, case-insensitive, in blacklist order.
std::vector<std::string> find_phrases(std::string_view text,
                                      const std::vector<std::string>& blacklist);

// Deletes every blacklisted phrase until none remain, then tidies the
// whitespace and punctuation left behind.
std::string strip_phrases(std::string_view text, const std::vector<std::string>& blacklist);

// First `max_lines` non-blank lines of `text`.
std::string limit_lines(std::string_view text, std::size_t max_lines);

std::string optimize_response(const StageContext& ctx, std::string_view question,
                              std::string_view intermediate, KScore kscore,
                              const OptimizerOptions& options = {});

}  // namespace ivy::pipeline
