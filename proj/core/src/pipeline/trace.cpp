#include "ivy/pipeline/trace.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ivy/error.hpp"

namespace ivy::pipeline {

using nlohmann::json;

KScore::KScore(int value) : value_(value) {
  if (value < kMin || value > kMax) {
    throw Error(ErrorCode::kInvalidArgument,
                "k-score must be in [1, 4], got " + std::to_string(value));
  }
}

std::string KnowledgeTrace::to_json(int indent) const {
  json calls = json::array();
  for (const auto& c : llm_calls) {
    calls.push_back({{"tag", std::string(llm::to_string(c.tag))},
                     {"request_hash", c.request_hash},
                     {"response_hash", c.response_hash}});
  }
  json docs_out = json::array();
  for (const auto& d : retrieved) {
    docs_out.push_back({{"doc_id", d.doc_id},
                        {"component_name", d.component_name},
                        {"kind", std::string(docs::to_string(d.kind))},
                        {"score", d.score}});
  }
  json out = {
      {"trace_id", trace_id},
      {"skill_id", skill_id},
      {"question", question},
      {"mode", std::string(docs::to_string(mode))},
      {"verdict",
       {{"relevant", verdict.relevant},
        {"matched_component_names", verdict.matched_component_names},
        {"rationale", verdict.rationale}}},
      {"kscore", kscore ? json(kscore->value()) : json(nullptr)},
      {"kscore_fallback", kscore_fallback},
      {"retrieved", docs_out},
      {"intermediate_responses", intermediate_responses},
      {"final_response", final_response},
      {"llm_calls", calls},
      {"started_at", started_at},
      {"finished_at", finished_at},
      {"diagnostics", diagnostics},
      {"error", error ? json(*error) : json(nullptr)},
  };
  return out.dump(indent);
}

KnowledgeTrace KnowledgeTrace::from_json(std::string_view text) {
  try {
    auto in = json::parse(text);
    KnowledgeTrace t;
    t.trace_id = in.at("trace_id").get<std::string>();
    t.skill_id = in.at("skill_id").get<std::string>();
    t.question = in.at("question").get<std::string>();
    t.mode = docs::corpus_mode_from(in.at("mode").get<std::string>());
    const auto& v = in.at("verdict");
    t.verdict.relevant = v.at("relevant").get<bool>();
    t.verdict.matched_component_names =
        v.at("matched_component_names").get<std::vector<std::string>>();
    t.verdict.rationale = v.at("rationale").get<std::string>();
    if (!in.at("kscore").is_null()) t.kscore = KScore(in.at("kscore").get<int>());
    t.kscore_fallback = in.value("kscore_fallback", false);
    for (const auto& d : in.at("retrieved")) {
      t.retrieved.push_back({d.at("doc_id").get<std::string>(),
                             d.at("component_name").get<std::string>(),
                             docs::component_kind_from(d.at("kind").get<std::string>()),
                             d.at("score").get<double>()});
    }
    t.intermediate_responses = in.at("intermediate_responses").get<std::vector<std::string>>();
    t.final_response = in.at("final_response").get<std::string>();
    for (const auto& c : in.at("llm_calls")) {
      t.llm_calls.push_back({llm::stage_tag_from(c.at("tag").get<std::string>()),
                             c.at("request_hash").get<std::string>(),
                             c.at("response_hash").get<std::string>()});
    }
    t.started_at = in.value("started_at", "");
    t.finished_at = in.value("finished_at", "");
    t.diagnostics = in.value("diagnostics", std::vector<std::string>{});
    if (in.contains("error") && !in.at("error").is_null()) {
      t.error = in.at("error").get<std::string>();
    }
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed trace: ") + e.what());
  }
}

std::string new_trace_id() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng()),
                static_cast<unsigned long long>(rng()));
  return buf;
}

std::string utc_now_iso() {
  auto now = std::chrono::system_clock::now();
  auto secs = std::chrono::system_clock::to_time_t(now);
  auto millis = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()) % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(millis.count()));
  return buf;
}

namespace {

bool valid_trace_id(std::string_view id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

TraceStore::TraceStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(*dir_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create trace directory " + dir_->string());
}

void TraceStore::put(const KnowledgeTrace& trace) {
  if (!valid_trace_id(trace.trace_id)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid trace id '" + trace.trace_id + "'");
  }
  std::lock_guard lock(mu_);
  if (!dir_) {
    if (!memory_.emplace(trace.trace_id, trace).second) {
      throw Error(ErrorCode::kInvalidArgument, "trace " + trace.trace_id + " already stored");
    }
    return;
  }
  auto final_path = *dir_ / (trace.trace_id + ".json");
  if (std::filesystem::exists(final_path)) {
    throw Error(ErrorCode::kInvalidArgument, "trace " + trace.trace_id + " already stored");
  }
  auto tmp_path = *dir_ / ("." + trace.trace_id + ".tmp");
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    out << trace.to_json() << '\n';
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp_path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot publish " + final_path.string() + ": " + ec.message());
}

std::optional<KnowledgeTrace> TraceStore::get(std::string_view trace_id) const {
  if (!valid_trace_id(trace_id)) return std::nullopt;
  if (!dir_) {
    std::lock_guard lock(mu_);
    auto it = memory_.find(trace_id);
    if (it == memory_.end()) return std::nullopt;
    return it->second;
  }
  std::ifstream in(*dir_ / (std::string(trace_id) + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return KnowledgeTrace::from_json(buf.str());
}

std::size_t TraceStore::size() const {
  if (!dir_) {
    std::lock_guard lock(mu_);
    return memory_.size();
  }
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(*dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") ++n;
  }
  return n;
}

}  // namespace ivy::pipeline
