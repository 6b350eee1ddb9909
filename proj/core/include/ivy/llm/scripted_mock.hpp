#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivy/llm/chat.hpp"

namespace ivy::llm {

// Deterministic chat backend driven by an ordered rule list. The first rule
// whose tag matches and whose pattern is found in the user message wins;
// when none match, the default response is used.
//
// Responses are templates:
//   {{user}}    the whole user message
//   {{system}}  the system prompt
//   {{0}}..{{9}} capture groups of the matching pattern (Perl syntax)
//
// Script files are JSON:
//   {"rules": [{"tag": "kscore", "pattern": "in detail", "response": "4"}, ...],
//    "default": "..."}
// "tag" and "pattern" are optional; an omitted pattern matches anything.
class ScriptedMock final : public ChatBackend {
 public:
  struct Rule {
    std::optional<StageTag> tag;
    std::string pattern;
    std::string response;
  };

  static constexpr std::string_view kDefaultResponse = "I have no scripted answer for that.";

  explicit ScriptedMock(std::vector<Rule> rules,
                        std::string default_response = std::string(kDefaultResponse));
  ~ScriptedMock() override;

  static std::shared_ptr<ScriptedMock> from_json(std::string_view json);
  static std::shared_ptr<ScriptedMock> from_file(const std::filesystem::path& path);

  BackendKind kind() const override { return BackendKind::kMock; }
  ChatResponse complete(const ChatRequest& request) const override;

  std::size_t rule_count() const noexcept { return rules_.size(); }

 private:
  struct Compiled;
  std::vector<Rule> rules_;
  std::string default_response_;
  std::unique_ptr<Compiled> compiled_;
};

}  // namespace ivy::llm
