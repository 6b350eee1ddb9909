#include "ivy/eval/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ivy/error.hpp"

namespace ivy::eval {

using nlohmann::json;

Stat Stat::of(const std::vector<double>& xs) {
  Stat s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  s.mean = mean;
  s.stddev = std::sqrt(ss / static_cast<double>(xs.size()));
  return s;
}

namespace {

struct Job {
  const VerificationQuestion* question;
  std::size_t repeat;
  bool active;
  std::string skill;
};

EvalRow run_row(const EvalContext& ctx, const Job& job, docs::CorpusMode mode) {
  const VerificationQuestion& q = *job.question;
  EvalRow row;
  row.question_id = q.id;
  row.repeat = job.repeat;
  row.category = q.category;
  row.skill_id = q.skill_id;
  row.asked_skill = job.skill;
  row.active = job.active;

  pipeline::KnowledgeTrace trace;
  try {
    trace = ctx.pipeline.run(q.question, job.skill, mode);
  } catch (const Error& e) {
    row.error = std::string(to_string(e.code())) + ": " + e.what();
    return row;
  }
  row.trace_id = trace.trace_id;
  row.refused = !trace.verdict.relevant;
  if (trace.kscore) row.kscore = trace.kscore->value();
  row.retrieved = trace.retrieved.size();
  row.final_response = trace.final_response;

  if (q.category == QuestionCategory::kCannotAnswer) {
    row.relevance_correct = row.refused;
  } else {
    auto prefix = job.skill + "/";
    row.relevance_correct =
        !row.refused && std::any_of(trace.retrieved.begin(), trace.retrieved.end(),
                                    [&](const auto& d) { return d.doc_id.rfind(prefix, 0) == 0; });
  }
  if (auto kind = expected_kind(q.category); kind && !trace.retrieved.empty()) {
    row.top1_kind_match = trace.retrieved.front().kind == *kind;
  }

  try {
    if (q.expected_response && !row.final_response.empty()) {
      row.similarity = similarity_score(row.final_response, *q.expected_response, ctx.eval_embedder);
    }
    if (trace.verdict.relevant && trace.complete() && !trace.intermediate_responses.empty()) {
      const auto* skill = ctx.pipeline.skills().find(job.skill);
      const auto& corpus = skill->indexes.at(mode).corpus;
      JudgeContext judges{ctx.judge_gateway, ctx.prompts, nullptr};
      row.grounding = judge_grounding(judges, trace, corpus);
      row.retention = judge_retention(judges, trace);
    }
  } catch (const Error& e) {
    row.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  return row;
}

json stat_json(const Stat& s) {
  return {{"n", s.n},
          {"mean", s.mean ? json(*s.mean) : json(nullptr)},
          {"std", s.stddev ? json(*s.stddev) : json(nullptr)}};
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json tally_json(const std::map<std::string, GroupTally>& groups) {
  json out = json::object();
  for (const auto& [key, g] : groups) {
    out[key] = {{"rows", g.rows},
                {"scored", g.scored},
                {"relevance_correct", g.relevance_correct},
                {"refusals", g.refusals}};
  }
  return out;
}

std::string fmt_opt(const std::optional<double>& v, double scale = 1.0) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v * scale);
  return buf;
}

}  // namespace

EvalReport reduce_rows(std::string suite_name, docs::CorpusMode mode, std::size_t repeats,
                       std::vector<EvalRow> rows) {
  EvalReport report;
  report.suite_name = std::move(suite_name);
  report.mode = mode;
  report.repeats = repeats;
  std::vector<double> sims, derived, retained;
  std::size_t correct = 0, kind_total = 0, kind_hits = 0;
  for (const auto& row : rows) {
    if (row.trace_id) ++report.trace_count;
    if (row.error) ++report.error_rows;
    if (row.trace_id && row.refused) ++report.refusals;
    auto& cat = report.by_category[std::string(display_name(row.category))];
    auto& skill = report.by_skill[row.skill_id.value_or("(none)")];
    for (auto* g : {&cat, &skill}) {
      ++g->rows;
      if (row.trace_id && row.refused) ++g->refusals;
    }
    if (!row.active) {
      ++report.inactive_rows;
      continue;
    }
    ++report.scored_rows;
    for (auto* g : {&cat, &skill}) {
      ++g->scored;
      if (row.relevance_correct) ++g->relevance_correct;
    }
    if (row.relevance_correct) ++correct;
    if (row.top1_kind_match) {
      ++kind_total;
      if (*row.top1_kind_match) ++kind_hits;
    }
    if (row.similarity) sims.push_back(*row.similarity);
    if (row.grounding) {
      if (row.grounding->valid) {
        derived.push_back(row.grounding->derived_fraction);
      } else {
        ++report.invalid_grounding;
      }
    }
    if (row.retention) {
      if (row.retention->valid) {
        retained.push_back(row.retention->retained_fraction);
      } else {
        ++report.invalid_retention;
      }
    }
  }
  if (report.scored_rows) {
    report.relevance_accuracy = static_cast<double>(correct) / static_cast<double>(report.scored_rows);
  }
  if (kind_total) {
    report.correct_component_rate = static_cast<double>(kind_hits) / static_cast<double>(kind_total);
  }
  report.similarity = Stat::of(sims);
  report.derived_fraction = Stat::of(derived);
  report.retained_fraction = Stat::of(retained);
  report.rows = std::move(rows);
  return report;
}

EvalReport run_eval(const EvalContext& ctx, const Suite& suite, const EvalOptions& options) {
  if (options.repeats == 0) throw Error(ErrorCode::kInvalidArgument, "repeats must be positive");
  const auto& skills = ctx.pipeline.skills();
  std::string host = options.host_skill;
  if (host.empty() && !skills.empty()) host = skills.skill_ids().front();
  if (!suite.questions.empty() && (host.empty() || !skills.find(host))) {
    throw Error(ErrorCode::kNotFound, "no host skill available for evaluation");
  }

  std::vector<Job> jobs;
  for (const auto& q : suite.questions) {
    bool active = !q.skill_id || skills.find(*q.skill_id) != nullptr;
    std::string skill = (q.skill_id && active) ? *q.skill_id : host;
    for (std::size_t r = 0; r < options.repeats; ++r) jobs.push_back({&q, r, active, skill});
  }

  std::vector<EvalRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      rows[i] = run_row(ctx, jobs[i], options.mode);
    }
  };
  std::size_t n = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(jobs.size(), 1));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return reduce_rows(suite.name, options.mode, options.repeats, std::move(rows));
}

std::string EvalReport::to_json(int indent) const {
  json out_rows = json::array();
  for (const auto& r : rows) {
    json row = {{"question_id", r.question_id},
                {"repeat", r.repeat},
                {"category", std::string(eval::to_string(r.category))},
                {"skill_id", r.skill_id ? json(*r.skill_id) : json(nullptr)},
                {"asked_skill", r.asked_skill},
                {"active", r.active},
                {"trace_id", r.trace_id ? json(*r.trace_id) : json(nullptr)},
                {"refused", r.refused},
                {"relevance_correct", r.relevance_correct},
                {"top1_kind_match", r.top1_kind_match ? json(*r.top1_kind_match) : json(nullptr)},
                {"kscore", r.kscore ? json(*r.kscore) : json(nullptr)},
                {"retrieved", r.retrieved},
                {"final_response", r.final_response},
                {"similarity", opt_json(r.similarity)},
                {"error", r.error ? json(*r.error) : json(nullptr)}};
    if (r.grounding) {
      row["grounding"] = {{"valid", r.grounding->valid},
                          {"derived_fraction", r.grounding->derived_fraction},
                          {"externally_added_spans", r.grounding->externally_added_spans},
                          {"reasoning", r.grounding->reasoning}};
    } else {
      row["grounding"] = nullptr;
    }
    if (r.retention) {
      row["retention"] = {{"valid", r.retention->valid},
                          {"retained_fraction", r.retention->retained_fraction},
                          {"omissions", r.retention->omissions},
                          {"reasoning", r.retention->reasoning}};
    } else {
      row["retention"] = nullptr;
    }
    out_rows.push_back(std::move(row));
  }
  json out = {{"suite", suite_name},
              {"mode", std::string(docs::to_string(mode))},
              {"repeats", repeats},
              {"trace_count", trace_count},
              {"scored_rows", scored_rows},
              {"inactive_rows", inactive_rows},
              {"error_rows", error_rows},
              {"refusals", refusals},
              {"relevance_accuracy", opt_json(relevance_accuracy)},
              {"correct_component_rate", opt_json(correct_component_rate)},
              {"similarity", stat_json(similarity)},
              {"derived_fraction", stat_json(derived_fraction)},
              {"retained_fraction", stat_json(retained_fraction)},
              {"invalid_grounding", invalid_grounding},
              {"invalid_retention", invalid_retention},
              {"by_category", tally_json(by_category)},
              {"by_skill", tally_json(by_skill)},
              {"rows", out_rows}};
  return out.dump(indent);
}

std::string EvalReport::summary() const {
  std::ostringstream out;
  out << "suite " << (suite_name.empty() ? "(unnamed)" : suite_name) << ", mode "
      << docs::to_string(mode) << ", repeats " << repeats << "\n";
  out << "traces: " << trace_count << " (scored " << scored_rows << ", inactive " << inactive_rows
      << ", errors " << error_rows << ", refusals " << refusals << ")\n";
  out << "relevance accuracy: " << fmt_opt(relevance_accuracy, 100.0) << "%\n";
  out << "correct component rate: " << fmt_opt(correct_component_rate, 100.0) << "%\n";
  out << "similarity: mean " << fmt_opt(similarity.mean) << ", std " << fmt_opt(similarity.stddev)
      << " over " << similarity.n << "\n";
  out << "derived fraction: mean " << fmt_opt(derived_fraction.mean) << ", std "
      << fmt_opt(derived_fraction.stddev) << " over " << derived_fraction.n << " (invalid "
      << invalid_grounding << ")\n";
  out << "retained fraction: mean " << fmt_opt(retained_fraction.mean) << ", std "
      << fmt_opt(retained_fraction.stddev) << " over " << retained_fraction.n << " (invalid "
      << invalid_retention << ")\n";
  out << "by category:\n";
  for (const auto& [key, g] : by_category) {
    out << "  " << key << ": rows " << g.rows << ", scored " << g.scored << ", relevance correct "
        << g.relevance_correct << ", refusals " << g.refusals << "\n";
  }
  out << "by skill:\n";
  for (const auto& [key, g] : by_skill) {
    out << "  " << key << ": rows " << g.rows << ", scored " << g.scored << ", relevance correct "
        << g.relevance_correct << ", refusals " << g.refusals << "\n";
  }
  return out.str();
}

}  // namespace ivy::eval
