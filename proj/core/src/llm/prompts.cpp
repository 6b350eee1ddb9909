#include "ivy/llm/prompts.hpp"

#include <fstream>
#include <sstream>

#include "ivy/error.hpp"

namespace ivy::llm {

const std::vector<std::string>& PromptLibrary::required_templates() {
  static const std::vector<std::string> names = {
      "relevance.system",       "relevance.user",       "kscore.system",
      "kscore.user",            "generate.system",      "generate.user",
      "refine.system",          "refine.user",          "optimize.system",
      "optimize.user",          "optimize.retry",       "reprompt",
      "refusal",                "verbosity.1",          "verbosity.2",
      "verbosity.3",            "verbosity.4",          "judge_grounding.system",
      "judge_grounding.user",   "judge_retention.system", "judge_retention.user",
  };
  return names;
}

PromptLibrary::PromptLibrary(std::map<std::string, std::string, std::less<>> templates)
    : templates_(std::move(templates)) {}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kConfig, "prompt directory " + dir.string() + " does not exist");
  }
  std::map<std::string, std::string, std::less<>> templates;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string body = buf.str();
    // Editors add a trailing newline; templates are inserted mid-message.
    while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.pop_back();
    templates[entry.path().stem().string()] = std::move(body);
  }
  for (const auto& name : required_templates()) {
    if (!templates.count(name)) {
      throw Error(ErrorCode::kConfig,
                  "prompt directory " + dir.string() + " is missing " + name + ".txt");
    }
  }
  return PromptLibrary(std::move(templates));
}

bool PromptLibrary::has(std::string_view name) const { return templates_.count(name) > 0; }

const std::string& PromptLibrary::raw(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw Error(ErrorCode::kConfig, "no prompt template named '" + std::string(name) + "'");
  }
  return it->second;
}

std::string PromptLibrary::render(std::string_view name, const PromptVars& vars) const {
  const std::string& tmpl = raw(name);
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto open = tmpl.find("{{", pos);
    if (open == std::string::npos) break;
    auto close = tmpl.find("}}", open + 2);
    if (close == std::string::npos) break;
    out.append(tmpl, pos, open - pos);
    std::string_view key(tmpl.data() + open + 2, close - open - 2);
    auto it = vars.find(key);
    if (it == vars.end()) {
      throw Error(ErrorCode::kConfig, "template '" + std::string(name) +
                                          "' uses unknown placeholder {{" + std::string(key) + "}}");
    }
    out += it->second;
    pos = close + 2;
  }
  out.append(tmpl, pos, std::string::npos);
  return out;
}

}  // namespace ivy::llm
