#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "ivy/service/environment.hpp"
#include "support.hpp"

namespace ivy::testing {

// Config file in a temp dir: shipped prompts, texts and suites, the given
// model directory, and index/trace output inside the temp dir.
inline std::filesystem::path write_service_config(const TempDir& tmp,
                                                  const std::string& mock = "demo",
                                                  const std::string& model_dir = "data/models") {
  nlohmann::json config = {
      {"model_dir", source_path(model_dir).string()},
      {"index_dir", "indexes"},
      {"trace_dir", "traces"},
      {"prompt_dir", source_path("prompts").string()},
      {"text_dir", source_path("data/texts").string()},
      {"suite_dir", source_path("suites").string()},
      {"gateway", {{"backend", "mock"}, {"mock_script", source_path("fixtures/mock/" + mock + ".json").string()}}},
      {"embedding", {{"provider", "mock"}, {"dim", 64}}},
      {"retry", {{"max_attempts", 3}, {"initial_backoff_ms", 1}, {"multiplier", 2.0}}},
      {"workers", 2},
      {"listen", "127.0.0.1:0"}};
  auto path = tmp / "ivy.json";
  write_file(path, config.dump(2));
  return path;
}

}  // namespace ivy::testing
