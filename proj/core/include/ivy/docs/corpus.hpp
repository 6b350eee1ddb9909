#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ivy/tmk/validate.hpp"

namespace ivy::docs {

enum class ComponentKind { kTask, kMethod, kKnowledge, kTextChunk };
enum class CorpusMode { kTmk, kBaseline };

std::string_view to_string(ComponentKind kind);
std::string_view to_string(CorpusMode mode);
ComponentKind component_kind_from(std::string_view s);
CorpusMode corpus_mode_from(std::string_view s);  // "tmk" | "baseline"

struct TmkDocument {
  std::string doc_id;  // "<skill>/<kind>/<component id>", stable across rebuilds
  ComponentKind kind = ComponentKind::kTask;
  std::string component_name;
  std::string body;
  std::string skill_id;

  bool operator==(const TmkDocument&) const = default;
};

struct Corpus {
  std::string skill_id;
  CorpusMode mode = CorpusMode::kTmk;
  std::vector<TmkDocument> documents;

  const TmkDocument* find(std::string_view doc_id) const;
  bool empty() const { return documents.empty(); }
  std::size_t size() const { return documents.size(); }

  std::string to_json() const;
  static Corpus from_json(std::string_view json);

  bool operator==(const Corpus&) const = default;
};

// One document per task, per method, per concept, plus one for relations and
// ground truths when the model has any. Order: tasks, methods, concepts,
// relations, each in model order.
Corpus render_documents(const tmk::ValidatedModel& model);

struct ChunkOptions {
  std::size_t chunk_size = 300;  // tokens
  std::size_t overlap = 50;      // tokens
};

// Splits raw text into overlapping windows of whitespace-delimited tokens.
// A token is a run of non-space bytes plus the whitespace that follows it,
// with any leading whitespace folded into the first token, so every chunk is
// an exact substring of `raw`. Chunk i starts at token i * (size - overlap);
// the last chunk ends at the final token. Text with no tokens yields an
// empty corpus.
Corpus chunk_text(std::string_view raw, std::string_view skill_id, ChunkOptions options = {});

// Token spans used by chunk_text, exposed for tests and tooling.
std::vector<std::string_view> whitespace_tokens(std::string_view raw);

}  // namespace ivy::docs
