#include "ivy/eval/judges.hpp"

#include <algorithm>
#include <cstdlib>

#include "ivy/error.hpp"
#include "ivy/text.hpp"

namespace ivy::eval {

double similarity_score(std::string_view generated, std::string_view expected,
                        const embed::EmbeddingProvider& provider) {
  if (text::trim(generated).empty() || text::trim(expected).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "similarity needs two non-empty texts");
  }
  auto a = provider.embed(generated);
  auto b = provider.embed(expected);
  return std::clamp(embed::cosine_similarity(a.values, b.values), 0.0, 1.0);
}

namespace {

std::optional<std::string_view> label_value(std::string_view line, std::string_view label) {
  line = text::trim(line);
  if (line.size() < label.size() + 1 || !text::iequals(line.substr(0, label.size()), label)) {
    return std::nullopt;
  }
  auto rest = text::trim(line.substr(label.size()));
  if (rest.empty() || rest.front() != ':') return std::nullopt;
  return text::trim(rest.substr(1));
}

std::optional<double> parse_percent(std::string_view s) {
  s = text::trim(s);
  if (!s.empty() && s.back() == '%') s.remove_suffix(1);
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  if (!(value >= 0.0 && value <= 100.0)) return std::nullopt;
  return value / 100.0;
}

}  // namespace

std::optional<JudgeReply> parse_judge_reply(std::string_view completion, std::string_view list_label) {
  JudgeReply reply;
  std::optional<double> fraction;
  bool have_list = false;
  bool in_reasoning = false;
  for (const auto& line : text::split(completion, '\n')) {
    if (auto v = label_value(line, "REASONING")) {
      reply.reasoning = std::string(*v);
      in_reasoning = true;
    } else if (auto f = label_value(line, "FRACTION")) {
      fraction = parse_percent(*f);
      if (!fraction) return std::nullopt;
      in_reasoning = false;
    } else if (auto items = label_value(line, list_label)) {
      have_list = true;
      in_reasoning = false;
      for (const auto& part : text::split(*items, '|')) {
        auto item = text::trim(part);
        if (!item.empty()) reply.items.emplace_back(item);
      }
      if (reply.items.size() == 1 && text::iequals(reply.items[0], "none")) reply.items.clear();
    } else if (in_reasoning && !text::trim(line).empty()) {
      reply.reasoning += '\n';
      reply.reasoning += text::trim(line);
    }
  }
  if (!fraction || !have_list) return std::nullopt;
  reply.fraction = *fraction;
  return reply;
}

namespace {

void require_judgeable(const pipeline::KnowledgeTrace& trace) {
  if (!trace.verdict.relevant || !trace.complete() || trace.intermediate_responses.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "trace " + trace.trace_id + " is not a relevant, complete answer");
  }
}

std::optional<JudgeReply> ask(const JudgeContext& ctx, llm::StageTag tag, const std::string& system,
                              const std::string& user, std::string_view list_label) {
  llm::ChatRequest request;
  request.system_prompt = system;
  request.user_message = user;
  request.tag = tag;
  if (auto reply = parse_judge_reply(ctx.gateway.complete(request, ctx.log).text, list_label)) {
    return reply;
  }
  request.user_message = user + "\n\n" + ctx.prompts.render("reprompt");
  return parse_judge_reply(ctx.gateway.complete(request, ctx.log).text, list_label);
}

}  // namespace

GroundingVerdict judge_grounding(const JudgeContext& ctx, const pipeline::KnowledgeTrace& trace,
                                 const docs::Corpus& corpus) {
  require_judgeable(trace);
  std::string documents;
  for (const auto& r : trace.retrieved) {
    const docs::TmkDocument* doc = corpus.find(r.doc_id);
    if (!doc) throw Error(ErrorCode::kNotFound, "retrieved document " + r.doc_id + " not in corpus");
    if (!documents.empty()) documents += "\n\n";
    documents += "[Document: " + doc->component_name + "]\n" + doc->body + "\n[End document]";
  }
  auto user = ctx.prompts.render("judge_grounding.user",
                                 {{"question", trace.question},
                                  {"documents", documents},
                                  {"intermediate", trace.intermediate_responses.back()},
                                  {"final", trace.final_response}});
  GroundingVerdict verdict;
  verdict.trace_ref = trace.trace_id;
  if (auto reply = ask(ctx, llm::StageTag::kJudgeGrounding,
                       ctx.prompts.render("judge_grounding.system"), user, "EXTERNAL")) {
    verdict.valid = true;
    verdict.derived_fraction = reply->fraction;
    verdict.externally_added_spans = std::move(reply->items);
    verdict.reasoning = std::move(reply->reasoning);
  }
  return verdict;
}

RetentionVerdict judge_retention(const JudgeContext& ctx, const pipeline::KnowledgeTrace& trace) {
  require_judgeable(trace);
  auto user = ctx.prompts.render("judge_retention.user",
                                 {{"question", trace.question},
                                  {"intermediate", trace.intermediate_responses.back()},
                                  {"final", trace.final_response}});
  RetentionVerdict verdict;
  verdict.trace_ref = trace.trace_id;
  if (auto reply = ask(ctx, llm::StageTag::kJudgeRetention,
                       ctx.prompts.render("judge_retention.system"), user, "OMISSIONS")) {
    verdict.valid = true;
    verdict.retained_fraction = reply->fraction;
    verdict.omissions = std::move(reply->items);
    verdict.reasoning = std::move(reply->reasoning);
  }
  return verdict;
}

}  // namespace ivy::eval
