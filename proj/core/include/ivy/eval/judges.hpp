#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivy/docs/corpus.hpp"
#include "ivy/embed/embedding.hpp"
#include "ivy/llm/gateway.hpp"
#include "ivy/llm/prompts.hpp"
#include "ivy/pipeline/trace.hpp"

namespace ivy::eval {

// max(0, cosine) of the evaluation embeddings, clamped to [0, 1]. Blank text
// throws kInvalidArgument.
double similarity_score(std::string_view generated, std::string_view expected,
                        const embed::EmbeddingProvider& provider);

// Parsed "REASONING: / FRACTION: 0-100 / <LIST>: a | b | none" reply.
struct JudgeReply {
  std::string reasoning;
  double fraction = 0.0;  // in [0, 1]
  std::vector<std::string> items;
};

std::optional<JudgeReply> parse_judge_reply(std::string_view completion, std::string_view list_label);

struct GroundingVerdict {
  std::string trace_ref;
  bool valid = false;  // false when the judge never produced a parseable reply
  double derived_fraction = 0.0;
  std::vector<std::string> externally_added_spans;
  std::string reasoning;
};

struct RetentionVerdict {
  std::string trace_ref;
  bool valid = false;
  double retained_fraction = 0.0;
  std::vector<std::string> omissions;
  std::string reasoning;
};

struct JudgeContext {
  const llm::Gateway& gateway;
  const llm::PromptLibrary& prompts;
  llm::CallLog* log = nullptr;
};

// Both judges require a relevant, complete trace with at least one
// intermediate response (kInvalidArgument otherwise). An unparseable reply
// is reprompted once, then the verdict is returned with valid=false.
GroundingVerdict judge_grounding(const JudgeContext& ctx, const pipeline::KnowledgeTrace& trace,
                                 const docs::Corpus& corpus);
RetentionVerdict judge_retention(const JudgeContext& ctx, const pipeline::KnowledgeTrace& trace);

}  // namespace ivy::eval
