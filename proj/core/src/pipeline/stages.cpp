#include "ivy/pipeline/stages.hpp"

#include <algorithm>
#include <cctype>

#include "ivy/error.hpp"
#include "ivy/text.hpp"

namespace ivy::pipeline {

namespace {

llm::ChatResponse call(const StageContext& ctx, llm::StageTag tag, std::string system,
                       std::string user) {
  llm::ChatRequest request;
  request.system_prompt = std::move(system);
  request.user_message = std::move(user);
  request.tag = tag;
  return ctx.gateway.complete(request, ctx.log);
}

void note(const StageContext& ctx, std::string message) {
  if (ctx.diagnostics) ctx.diagnostics->push_back(std::move(message));
}

// Value after "<key>:" when the trimmed line starts with it.
std::optional<std::string_view> field(std::string_view line, std::string_view key) {
  line = text::trim(line);
  if (line.size() <= key.size() || !text::iequals(line.substr(0, key.size()), key)) {
    return std::nullopt;
  }
  auto rest = text::trim(line.substr(key.size()));
  if (rest.empty() || rest.front() != ':') return std::nullopt;
  return text::trim(rest.substr(1));
}

std::string_view strip_period(std::string_view s) {
  while (!s.empty() && s.back() == '.') s.remove_suffix(1);
  return text::trim(s);
}

std::string with_reprompt(const StageContext& ctx, const std::string& user) {
  return user + "\n\n" + ctx.prompts.render("reprompt");
}

}  // namespace

std::vector<std::string> component_names(const tmk::TmkModel& model) {
  std::vector<std::string> names;
  auto add = [&](const std::string& name) {
    if (name.empty()) return;
    for (const auto& n : names) {
      if (text::iequals(n, name)) return;
    }
    names.push_back(name);
  };
  add(model.skill_name);
  for (const auto& t : model.tasks) add(t.name);
  for (const auto& m : model.methods) add(m.name);
  for (const auto& c : model.knowledge.concepts) add(c.name);
  return names;
}

std::optional<RelevanceVerdict> parse_relevance(std::string_view completion) {
  std::optional<bool> relevant;
  RelevanceVerdict verdict;
  for (const auto& line : text::split(completion, '\n')) {
    if (auto v = field(line, "RELEVANT")) {
      auto answer = text::to_lower(strip_period(*v));
      if (answer == "yes" || answer == "true") {
        relevant = true;
      } else if (answer == "no" || answer == "false") {
        relevant = false;
      } else {
        return std::nullopt;
      }
    } else if (auto m = field(line, "MATCHES")) {
      for (const auto& part : text::split(*m, ';')) {
        auto name = strip_period(part);
        if (!name.empty()) verdict.matched_component_names.emplace_back(name);
      }
    } else if (auto r = field(line, "RATIONALE")) {
      verdict.rationale = std::string(*r);
    }
  }
  if (!relevant) return std::nullopt;
  verdict.relevant = *relevant;
  if (!verdict.relevant) verdict.matched_component_names.clear();
  if (verdict.relevant && verdict.matched_component_names.empty()) return std::nullopt;
  return verdict;
}

RelevanceVerdict assess_relevance(const StageContext& ctx, std::string_view question,
                                  const tmk::ValidatedModel& model) {
  if (text::trim(question).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "question must be non-empty");
  }
  std::string listing;
  for (const auto& name : component_names(model.model())) {
    if (!listing.empty()) listing += '\n';
    listing += "- " + name;
  }
  auto system = ctx.prompts.render("relevance.system");
  auto user = ctx.prompts.render(
      "relevance.user",
      {{"skill", model->skill_name}, {"components", listing}, {"question", std::string(question)}});
  if (auto v = parse_relevance(call(ctx, llm::StageTag::kRelevance, system, user).text)) return *v;
  note(ctx, "relevance reply unparseable; reprompted");
  if (auto v = parse_relevance(
          call(ctx, llm::StageTag::kRelevance, system, with_reprompt(ctx, user)).text)) {
    return *v;
  }
  note(ctx, "relevance reply unparseable after reprompt; treated as not relevant");
  return {false, {}, "unparseable relevance reply"};
}

std::optional<KScore> parse_kscore(std::string_view completion) {
  auto s = strip_period(text::trim(completion));
  if (s.empty() || s.size() > 2) return std::nullopt;
  if (!std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    return std::nullopt;
  }
  int value = std::stoi(std::string(s));
  if (value < KScore::kMin || value > KScore::kMax) return std::nullopt;
  return KScore(value);
}

Complexity assess_complexity(const StageContext& ctx, std::string_view question, KScore fallback) {
  if (text::trim(question).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "question must be non-empty");
  }
  auto reply = call(ctx, llm::StageTag::kKScore, ctx.prompts.render("kscore.system"),
                    ctx.prompts.render("kscore.user", {{"question", std::string(question)}}));
  if (auto k = parse_kscore(reply.text)) return {*k, false};
  note(ctx, "k-score reply unparseable; used fallback " + std::to_string(fallback.value()));
  return {fallback, true};
}

std::vector<embed::ScoredDoc> retrieve(std::string_view question, const embed::VectorIndex& index,
                                       const embed::EmbeddingProvider& embedder, KScore kscore) {
  if (index.empty()) return {};
  auto k = std::min<std::size_t>(static_cast<std::size_t>(kscore.value()), index.size());
  return index.top_k(embedder.embed(question), k);
}

void generate_response(const StageContext& ctx, std::string_view question,
                       const std::vector<const docs::TmkDocument*>& docs,
                       std::vector<std::string>& out) {
  if (docs.empty()) throw Error(ErrorCode::kInvalidArgument, "generation needs a document");
  const std::string q(question);
  auto first = call(ctx, llm::StageTag::kGenerate, ctx.prompts.render("generate.system"),
                    ctx.prompts.render("generate.user", {{"question", q},
                                                         {"name", docs[0]->component_name},
                                                         {"body", docs[0]->body}}));
  out.push_back(std::move(first.text));
  for (std::size_t i = 1; i < docs.size(); ++i) {
    auto next = call(ctx, llm::StageTag::kRefine, ctx.prompts.render("refine.system"),
                     ctx.prompts.render("refine.user", {{"question", q},
                                                        {"draft", out.back()},
                                                        {"name", docs[i]->component_name},
                                                        {"body", docs[i]->body}}));
    out.push_back(std::move(next.text));
  }
}

std::vector<std::string> find_phrases(std::string_view text,
                                      const std::vector<std::string>& blacklist) {
  std::vector<std::string> found;
  for (const auto& phrase : blacklist) {
    if (!phrase.empty() && text::ifind(text, phrase) != std::string_view::npos) {
      found.push_back(phrase);
    }
  }
  return found;
}

namespace {

bool is_punct_after_gap(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
}

std::string tidy_line(std::string_view line) {
  std::string out;
  for (char c : line) {
    if (c == ' ' || c == '\t') {
      if (!out.empty() && out.back() != ' ') out += ' ';
      continue;
    }
    if (is_punct_after_gap(c)) {
      while (!out.empty() && out.back() == ' ') out.pop_back();
      if (c == ',' && !out.empty() && is_punct_after_gap(out.back())) continue;
      if (!out.empty() && out.back() == ',') out.pop_back();
    }
    out += c;
  }
  std::size_t start = 0;
  while (start < out.size() && (out[start] == ' ' || out[start] == ',' || out[start] == ';')) {
    ++start;
  }
  out.erase(0, start);
  while (!out.empty() && out.back() == ' ') out.pop_back();
  bool has_word = std::any_of(out.begin(), out.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80;
  });
  return has_word ? out : std::string();
}

bool at_sentence_start(const std::string& s, std::size_t pos) {
  while (pos > 0 && (s[pos - 1] == ' ' || s[pos - 1] == '\t' || s[pos - 1] == ',')) --pos;
  return pos == 0 || s[pos - 1] == '\n' || s[pos - 1] == '.' || s[pos - 1] == '!' ||
         s[pos - 1] == '?';
}

void capitalize_from(std::string& s, std::size_t pos) {
  while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == ',')) ++pos;
  if (pos < s.size()) s[pos] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[pos])));
}

}  // namespace

std::string strip_phrases(std::string_view input, const std::vector<std::string>& blacklist) {
  std::string current(input);
  while (!find_phrases(current, blacklist).empty()) {
    for (const auto& phrase : blacklist) {
      if (phrase.empty()) continue;
      std::size_t pos;
      while ((pos = text::ifind(current, phrase)) != std::string::npos) {
        current.erase(pos, phrase.size());
        if (at_sentence_start(current, pos)) capitalize_from(current, pos);
      }
    }
    std::vector<std::string> lines;
    for (const auto& line : text::split(current, '\n')) lines.push_back(tidy_line(line));
    current = text::join(lines, "\n");
  }
  return current;
}

std::string limit_lines(std::string_view input, std::size_t max_lines) {
  std::vector<std::string> kept;
  for (const auto& line : text::split(input, '\n')) {
    if (text::trim(line).empty()) continue;
    if (kept.size() == max_lines) break;
    kept.emplace_back(text::trim(line));
  }
  return text::join(kept, "\n");
}

std::string optimize_response(const StageContext& ctx, std::string_view question,
                              std::string_view intermediate, KScore kscore,
                              const OptimizerOptions& options) {
  if (text::trim(intermediate).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to optimize");
  }
  auto verbosity = ctx.prompts.render("verbosity." + std::to_string(kscore.value()));
  auto system = ctx.prompts.render("optimize.system");
  auto user = ctx.prompts.render("optimize.user", {{"question", std::string(question)},
                                                   {"verbosity", verbosity},
                                                   {"draft", std::string(intermediate)}});
  auto result = call(ctx, llm::StageTag::kOptimize, system, user).text;
  auto found = find_phrases(result, options.blacklist);
  if (!found.empty()) {
    note(ctx, "optimizer output contained \"" + text::join(found, "\", \"") + "\"; reprompted");
    auto retry = ctx.prompts.render("optimize.retry",
                                    {{"phrases", "\"" + text::join(found, "\", \"") + "\""}});
    result = call(ctx, llm::StageTag::kOptimize, system, user + "\n\n" + retry).text;
    if (!find_phrases(result, options.blacklist).empty()) {
      note(ctx, "optimizer phrases removed mechanically");
      result = strip_phrases(result, options.blacklist);
    }
  }
  if (kscore.value() == 1 && text::line_count(result) > 2) {
    note(ctx, "optimizer output cut to 2 lines for k-score 1");
    result = limit_lines(result, 2);
  }
  if (text::trim(result).empty()) {
    note(ctx, "optimizer output empty after cleanup; used the cleaned draft");
    result = strip_phrases(intermediate, options.blacklist);
    if (kscore.value() == 1) result = limit_lines(result, 2);
  }
  if (text::trim(result).empty()) {
    throw Error(ErrorCode::kEmptyCompletion, "optimizer produced no usable text");
  }
  return result;
}

}  // namespace ivy::pipeline
