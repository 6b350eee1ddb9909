#include "ivy/docs/corpus.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ivy/error.hpp"
#include "ivy/text.hpp"

namespace ivy::docs {

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::kTask: return "task";
    case ComponentKind::kMethod: return "method";
    case ComponentKind::kKnowledge: return "knowledge";
    case ComponentKind::kTextChunk: return "text-chunk";
  }
  return "task";
}

std::string_view to_string(CorpusMode mode) {
  return mode == CorpusMode::kTmk ? "tmk" : "baseline";
}

ComponentKind component_kind_from(std::string_view s) {
  if (s == "task") return ComponentKind::kTask;
  if (s == "method") return ComponentKind::kMethod;
  if (s == "knowledge") return ComponentKind::kKnowledge;
  if (s == "text-chunk") return ComponentKind::kTextChunk;
  throw Error(ErrorCode::kInvalidArgument, "unknown component kind '" + std::string(s) + "'");
}

CorpusMode corpus_mode_from(std::string_view s) {
  if (s == "tmk") return CorpusMode::kTmk;
  if (s == "baseline") return CorpusMode::kBaseline;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown mode '" + std::string(s) + "' (expected tmk or baseline)");
}

const TmkDocument* Corpus::find(std::string_view doc_id) const {
  for (const auto& d : documents) {
    if (d.doc_id == doc_id) return &d;
  }
  return nullptr;
}

std::string Corpus::to_json() const {
  nlohmann::json out;
  out["skill_id"] = skill_id;
  out["mode"] = std::string(to_string(mode));
  out["documents"] = nlohmann::json::array();
  for (const auto& d : documents) {
    out["documents"].push_back({{"doc_id", d.doc_id},
                                {"kind", std::string(to_string(d.kind))},
                                {"component_name", d.component_name},
                                {"body", d.body}});
  }
  return out.dump(2);
}

Corpus Corpus::from_json(std::string_view json) {
  try {
    auto in = nlohmann::json::parse(json);
    Corpus c;
    c.skill_id = in.at("skill_id").get<std::string>();
    c.mode = corpus_mode_from(in.at("mode").get<std::string>());
    for (const auto& d : in.at("documents")) {
      TmkDocument doc;
      doc.doc_id = d.at("doc_id").get<std::string>();
      doc.kind = component_kind_from(d.at("kind").get<std::string>());
      doc.component_name = d.at("component_name").get<std::string>();
      doc.body = d.at("body").get<std::string>();
      doc.skill_id = c.skill_id;
      c.documents.push_back(std::move(doc));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed corpus file: ") + e.what());
  }
}

namespace {

std::string list_or_none(const std::vector<std::string>& items) {
  return items.empty() ? std::string("none") : text::join(items, "; ");
}

std::string concept_label(const tmk::Knowledge& k, const std::string& ref) {
  for (const auto& c : k.concepts) {
    if (text::iequals(c.concept_id, ref) || text::iequals(c.name, ref)) return c.name;
  }
  return ref;
}

std::string relation_line(const tmk::Knowledge& k, const tmk::Relation& r) {
  return concept_label(k, r.subject) + " " + r.relation + " " + concept_label(k, r.object);
}

std::string render_task(const tmk::TmkModel& m, const tmk::Task& task) {
  std::ostringstream b;
  b << "Kind: Task\n";
  b << "Name: " << task.name << "\n";
  b << "Skill: " << m.skill_name << "\n";
  b << "Goal: " << task.goal << "\n";
  b << "Inputs: " << list_or_none(task.inputs) << "\n";
  b << "Givens: " << list_or_none(task.givens) << "\n";
  b << "Makes: " << list_or_none(task.makes) << "\n";
  b << "Outputs: " << list_or_none(task.outputs) << "\n";
  std::vector<std::string> methods;
  for (const auto& ref : task.method_refs) methods.push_back(m.find_method(ref)->name);
  b << "Methods: " << list_or_none(methods) << "\n";

  std::vector<std::string> parents;
  for (const auto& method : m.methods) {
    for (const auto& s : method.organizer.states) {
      if (s.sub_goal && *s.sub_goal == task.task_id) {
        parents.push_back(method.name + " (state " + s.state_id + ": " + s.description + ")");
      }
    }
  }
  bool is_root = false;
  for (const auto& r : m.root_tasks) is_root = is_root || r == task.task_id;
  if (is_root) b << "Role: root task of the skill\n";
  if (!parents.empty()) b << "Sub-goal of: " << text::join(parents, "; ") << "\n";
  return b.str();
}

std::string render_method(const tmk::TmkModel& m, const tmk::Method& method) {
  const tmk::Fsm& fsm = method.organizer;
  std::ostringstream b;
  b << "Kind: Method\n";
  b << "Name: " << method.name << "\n";
  b << "Skill: " << m.skill_name << "\n";
  std::vector<std::string> achieves;
  for (const auto& task : m.tasks) {
    for (const auto& ref : task.method_refs) {
      if (ref == method.method_id) achieves.push_back(task.name);
    }
  }
  b << "Achieves: " << list_or_none(achieves) << "\n";
  b << "Start state: " << fsm.start_state << "\n";
  b << "Accepting states: " << list_or_none(fsm.accepting_states) << "\n";
  b << "States:\n";
  for (const auto& s : fsm.states) {
    b << "- " << s.state_id << ": " << s.description;
    if (s.sub_goal) b << " (sub-goal: " << m.find_task(*s.sub_goal)->name << ")";
    b << "\n";
  }
  b << "Transitions:\n";
  for (const auto& t : fsm.transitions) {
    b << "- " << t.from << " --[" << t.condition << "]--> " << t.to << "\n";
  }
  return b.str();
}

std::string render_concept(const tmk::TmkModel& m, const tmk::Concept& c) {
  const tmk::Knowledge& k = m.knowledge;
  std::ostringstream b;
  b << "Kind: Knowledge\n";
  b << "Name: " << c.name << "\n";
  b << "Skill: " << m.skill_name << "\n";
  b << "Properties:\n";
  if (c.properties.empty()) b << "- none\n";
  for (const auto& p : c.properties) b << "- " << p.name << ": " << p.semantic_type << "\n";
  std::vector<std::string> rels;
  for (const auto& r : k.relations) {
    bool touches = text::iequals(concept_label(k, r.subject), c.name) ||
                   text::iequals(concept_label(k, r.object), c.name);
    if (touches) rels.push_back(relation_line(k, r));
  }
  if (!rels.empty()) {
    b << "Relations:\n";
    for (const auto& r : rels) b << "- " << r << "\n";
  }
  return b.str();
}

std::string render_relations(const tmk::TmkModel& m, const std::string& name) {
  const tmk::Knowledge& k = m.knowledge;
  std::ostringstream b;
  b << "Kind: Knowledge\n";
  b << "Name: " << name << "\n";
  b << "Skill: " << m.skill_name << "\n";
  b << "Relations:\n";
  if (k.relations.empty()) b << "- none\n";
  for (const auto& r : k.relations) b << "- " << relation_line(k, r) << "\n";
  b << "Ground truths:\n";
  if (k.ground_truths.empty()) b << "- none\n";
  for (const auto& g : k.ground_truths) b << "- " << g << "\n";
  return b.str();
}

}  // namespace

Corpus render_documents(const tmk::ValidatedModel& validated) {
  const tmk::TmkModel& m = validated.model();
  Corpus corpus;
  corpus.skill_id = m.skill_id;
  corpus.mode = CorpusMode::kTmk;
  auto push = [&](std::string path, ComponentKind kind, std::string name, std::string body) {
    corpus.documents.push_back(
        {m.skill_id + "/" + path, kind, std::move(name), std::move(body), m.skill_id});
  };
  for (const auto& task : m.tasks) {
    push("task/" + task.task_id, ComponentKind::kTask, task.name, render_task(m, task));
  }
  for (const auto& method : m.methods) {
    push("method/" + method.method_id, ComponentKind::kMethod, method.name,
         render_method(m, method));
  }
  for (const auto& c : m.knowledge.concepts) {
    push("concept/" + c.concept_id, ComponentKind::kKnowledge, c.name, render_concept(m, c));
  }
  if (!m.knowledge.relations.empty() || !m.knowledge.ground_truths.empty()) {
    std::string name = m.skill_name + " relations and ground truths";
    push("knowledge/relations", ComponentKind::kKnowledge, name, render_relations(m, name));
  }
  return corpus;
}

std::vector<std::string_view> whitespace_tokens(std::string_view raw) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  std::size_t token_start = 0;
  while (pos < raw.size() && is_space(raw[pos])) ++pos;  // leading space joins token 0
  while (pos < raw.size()) {
    while (pos < raw.size() && !is_space(raw[pos])) ++pos;
    while (pos < raw.size() && is_space(raw[pos])) ++pos;
    tokens.push_back(raw.substr(token_start, pos - token_start));
    token_start = pos;
  }
  return tokens;
}

Corpus chunk_text(std::string_view raw, std::string_view skill_id, ChunkOptions options) {
  if (options.chunk_size == 0 || options.overlap >= options.chunk_size) {
    throw Error(ErrorCode::kInvalidArgument, "chunk_text requires chunk_size > overlap >= 0");
  }
  Corpus corpus;
  corpus.skill_id = std::string(skill_id);
  corpus.mode = CorpusMode::kBaseline;

  auto tokens = whitespace_tokens(raw);
  // A whitespace-only input has a single token made of spaces; treat as empty.
  if (tokens.empty() || text::trim(raw).empty()) return corpus;

  const std::size_t stride = options.chunk_size - options.overlap;
  const char* base = raw.data();
  for (std::size_t start = 0;; start += stride) {
    std::size_t end = std::min(start + options.chunk_size, tokens.size());
    auto begin_off = static_cast<std::size_t>(tokens[start].data() - base);
    auto end_off = static_cast<std::size_t>(tokens[end - 1].data() - base) + tokens[end - 1].size();
    char id[16];
    std::snprintf(id, sizeof id, "%04zu", corpus.documents.size());
    corpus.documents.push_back({std::string(skill_id) + "/chunk/" + id, ComponentKind::kTextChunk,
                                "text chunk " + std::string(id),
                                std::string(raw.substr(begin_off, end_off - begin_off)),
                                std::string(skill_id)});
    if (end == tokens.size()) break;
  }
  return corpus;
}

}  // namespace ivy::docs
