#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "ivy/error.hpp"
#include "ivy/eval/runner.hpp"
#include "ivy/eval/votes.hpp"
#include "ivy/service/config.hpp"
#include "ivy/service/environment.hpp"
#include "ivy/service/http_server.hpp"
#include "ivy/tmk/parser.hpp"
#include "ivy/tmk/validate.hpp"
#include "ivy/text.hpp"

namespace {

using namespace ivy;

service::ServiceConfig load_config(const std::string& path) {
  service::ServiceConfig config;
  if (!path.empty()) {
    config = service::ServiceConfig::load(path);
  } else if (std::filesystem::exists("ivy.json")) {
    config = service::ServiceConfig::load("ivy.json");
  } else {
    config = service::ServiceConfig::from_json("{}", std::filesystem::current_path());
  }
  config.apply_environment();
  return config;
}

int cmd_validate(const std::string& file, bool as_json) {
  tmk::TmkModel model;
  try {
    model = tmk::load_tmk_file(file);
  } catch (const tmk::ParseError& e) {
    std::cout << e.what() << "\nparse-error\n";
    return 1;
  }
  auto report = tmk::validate(model);
  if (as_json) {
    std::cout << report.to_json() << "\n";
  } else {
    for (const auto& d : report.defects) {
      std::cout << tmk::to_string(d.severity) << " " << tmk::to_string(d.code) << " " << d.location
                << ": " << d.message << "\n";
    }
    std::cout << report.error_count() << " errors, " << report.warning_count() << " warnings\n";
  }
  return report.accepted() ? 0 : 1;
}

std::vector<docs::CorpusMode> modes_from(const std::string& mode) {
  if (mode == "all") return {docs::CorpusMode::kTmk, docs::CorpusMode::kBaseline};
  return {docs::corpus_mode_from(mode)};
}

int cmd_index(const service::ServiceConfig& config, const std::string& skill,
              const std::string& mode) {
  auto embedder = service::make_embedder(config.embedding, config.retry);
  for (auto& model : service::load_models(config.model_dir)) {
    if (model->skill_id != skill) continue;
    for (auto m : modes_from(mode)) {
      auto corpus = service::build_corpus(model, m, config);
      auto index = embed::build_index(corpus, *embedder);
      auto dir = config.index_dir / skill / std::string(docs::to_string(m));
      embed::save_index(dir, corpus, index);
      std::cout << "indexed " << skill << "/" << docs::to_string(m) << ": " << index.size()
                << " documents, dim " << index.dim() << " -> " << dir.string() << "\n";
    }
    return 0;
  }
  throw Error(ErrorCode::kNotFound, "unknown skill '" + skill + "'");
}

int cmd_ask(const service::ServiceConfig& config, const std::string& skill,
            const std::string& question, const std::string& mode, bool show_trace) {
  auto env = service::load_environment(config);
  auto trace = env->pipeline->run(question, skill, docs::corpus_mode_from(mode));
  std::cout << trace.final_response << "\n";
  if (show_trace) {
    std::cout << "\n" << trace.to_json() << "\n";
  } else {
    std::cout << "\ntrace " << trace.trace_id << "\n";
  }
  return 0;
}

int cmd_chat(const service::ServiceConfig& config, const std::string& skill, const std::string& mode) {
  auto env = service::load_environment(config);
  auto m = docs::corpus_mode_from(mode);
  if (!env->skills->find(skill)) throw Error(ErrorCode::kNotFound, "unknown skill '" + skill + "'");
  std::string line;
  while (true) {
    std::cout << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    auto q = std::string(text::trim(line));
    if (q.empty()) continue;
    if (q == "exit" || q == "quit") break;
    try {
      auto answered = env->pipeline->answer(q, skill, m);
      std::cout << answered.final_response << "\n[trace " << answered.trace_id << "]\n";
    } catch (const Error& e) {
      std::cout << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    }
  }
  std::cout << "\n";
  return 0;
}

int cmd_eval(const service::ServiceConfig& config, const std::string& suite_path,
             std::size_t repeats, const std::string& mode, const std::string& report_out,
             std::size_t workers) {
  auto env = service::load_environment(config);
  auto suite = eval::Suite::load(suite_path);
  eval::EvalOptions options;
  options.repeats = repeats;
  options.mode = docs::corpus_mode_from(mode);
  options.workers = workers ? workers : config.workers;
  auto report = eval::run_eval(env->eval_context(), suite, options);
  std::cout << report.summary();
  if (!report_out.empty()) {
    std::ofstream out(report_out, std::ios::binary | std::ios::trunc);
    out << report.to_json() << "\n";
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + report_out);
    std::cout << "report written to " << report_out << "\n";
  }
  return report.error_rows == 0 ? 0 : 1;
}

void print_tally(const char* title, const std::vector<std::string>& systems,
                 const std::map<std::string, int>& records,
                 const std::map<std::string, std::map<std::string, int>>& by_system) {
  std::cout << title << ":\n";
  for (const auto& [group, n] : records) {
    std::cout << "  " << group << " (" << n << " records):";
    for (const auto& s : systems) {
      int votes = 0;
      if (auto it = by_system.find(s); it != by_system.end()) {
        if (auto g = it->second.find(group); g != it->second.end()) votes = g->second;
      }
      std::cout << " " << s << " " << votes;
    }
    std::cout << "\n";
  }
}

int cmd_report(const std::string& path) {
  auto votes = eval::load_votes(path);
  auto tally = eval::tally_votes(votes);
  auto systems = eval::systems_in(votes);
  std::cout << "records: " << tally.records << "\n";
  for (const auto& s : systems) {
    std::printf("%s: %d votes, agreement index %.2f\n", s.c_str(), tally.totals[s],
                eval::agreement_index(votes, s));
  }
  std::fflush(stdout);
  print_tally("by category", systems, tally.records_by_category, tally.by_category);
  print_tally("by skill", systems, tally.records_by_skill, tally.by_skill);
  return 0;
}

int cmd_serve(const service::ServiceConfig& config, const std::string& listen_override) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto env = service::load_environment(config);
  for (const auto& note : env->notes) std::cerr << "note: " << note << "\n";
  auto address = service::parse_listen(listen_override.empty() ? config.listen : listen_override);
  service::HttpServer server(env);
  int port = server.bind(address.host, address.port);
  std::cerr << "serving " << env->skills->skill_ids().size() << " skills on http://"
            << address.host << ":" << port << "\n";

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    std::cerr << "shutting down\n";
    server.stop();
  });
  server.run();
  // run() also returns when the listener fails; wake the waiter either way.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ivy: skill explanations grounded in TMK models"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "service config file (default ./ivy.json)");

  auto* validate = app.add_subcommand("validate", "check a .tmk model file");
  std::string model_file;
  bool validate_json = false;
  validate->add_option("model-file", model_file)->required();
  validate->add_flag("--json", validate_json, "print the report as JSON");

  auto* index = app.add_subcommand("index", "build and save a skill's retrieval index");
  std::string index_skill, index_mode = "all";
  index->add_option("skill", index_skill)->required();
  index->add_option("--mode", index_mode)->check(CLI::IsMember({"tmk", "baseline", "all"}));

  auto* ask = app.add_subcommand("ask", "answer one question");
  std::string ask_skill, question, ask_mode = "tmk";
  bool show_trace = false;
  ask->add_option("skill", ask_skill)->required();
  ask->add_option("question", question)->required();
  ask->add_option("--mode", ask_mode)->check(CLI::IsMember({"tmk", "baseline"}));
  ask->add_flag("--show-trace", show_trace, "print the knowledge trace");

  auto* chat = app.add_subcommand("chat", "answer questions read from stdin");
  std::string chat_skill, chat_mode = "tmk";
  chat->add_option("skill", chat_skill)->required();
  chat->add_option("--mode", chat_mode)->check(CLI::IsMember({"tmk", "baseline"}));

  auto* evalc = app.add_subcommand("eval", "run a verification suite");
  std::string suite, eval_mode = "tmk", report_out;
  std::size_t repeats = 1, workers = 0;
  evalc->add_option("--suite", suite)->required();
  evalc->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  evalc->add_option("--mode", eval_mode)->check(CLI::IsMember({"tmk", "baseline"}));
  evalc->add_option("--report-out", report_out, "write the JSON report here");
  evalc->add_option("--workers", workers, "parallel rows (default from config)");

  auto* report = app.add_subcommand("report", "agreement indices from vote files");
  std::string votes_path;
  report->add_option("votes", votes_path, "CSV file or directory of CSV files")->required();

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  std::string listen;
  serve->add_option("--listen", listen, "host:port (overrides config and IVY_LISTEN)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(model_file, validate_json);
    if (*report) return cmd_report(votes_path);
    auto config = load_config(config_path);
    if (*index) return cmd_index(config, index_skill, index_mode);
    if (*ask) return cmd_ask(config, ask_skill, question, ask_mode, show_trace);
    if (*chat) return cmd_chat(config, chat_skill, chat_mode);
    if (*evalc) return cmd_eval(config, suite, repeats, eval_mode, report_out, workers);
    if (*serve) return cmd_serve(config, listen);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
