#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivy/docs/corpus.hpp"
#include "ivy/llm/gateway.hpp"

namespace ivy::pipeline {

// Retrieval depth and verbosity level of one question.
class KScore {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 4;

  // Throws Error(kInvalidArgument) outside [kMin, kMax].
  explicit KScore(int value);

  int value() const noexcept { return value_; }
  auto operator<=>(const KScore&) const = default;

 private:
  int value_;
};

struct RelevanceVerdict {
  bool relevant = false;
  std::vector<std::string> matched_component_names;  // non-empty when relevant
  std::string rationale;

  bool operator==(const RelevanceVerdict&) const = default;
};

struct RetrievedDoc {
  std::string doc_id;
  std::string component_name;
  docs::ComponentKind kind = docs::ComponentKind::kTask;
  double score = 0.0;

  bool operator==(const RetrievedDoc&) const = default;
};

// Audit record of one answered question.
struct KnowledgeTrace {
  std::string trace_id;
  std::string skill_id;
  std::string question;
  docs::CorpusMode mode = docs::CorpusMode::kTmk;
  RelevanceVerdict verdict;
  std::optional<KScore> kscore;
  bool kscore_fallback = false;  // completion was unparseable, fallback used
  std::vector<RetrievedDoc> retrieved;
  std::vector<std::string> intermediate_responses;
  std::string final_response;
  std::vector<llm::LlmCall> llm_calls;
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;  // ISO-8601 UTC
  std::vector<std::string> diagnostics;
  std::optional<std::string> error;  // set when a stage aborted the run

  bool complete() const { return !error && !final_response.empty(); }

  std::string to_json(int indent = 2) const;
  static KnowledgeTrace from_json(std::string_view json);

  bool operator==(const KnowledgeTrace&) const = default;
};

// 32 random lowercase hex digits.
std::string new_trace_id();

// Current time as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string utc_now_iso();

// Trace persistence. With a directory every trace is written to
// `<dir>/<trace_id>.json` via a temporary file and rename, and reads go to
// disk; without one traces are kept in memory. Thread-safe.
class TraceStore {
 public:
  TraceStore() = default;
  explicit TraceStore(std::filesystem::path dir);

  // Throws kInvalidArgument for a malformed or already-stored id.
  void put(const KnowledgeTrace& trace);
  std::optional<KnowledgeTrace> get(std::string_view trace_id) const;
  std::size_t size() const;

  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

 private:
  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mu_;
  std::map<std::string, KnowledgeTrace, std::less<>> memory_;
};

}  // namespace ivy::pipeline
