#include "ivy/llm/scripted_mock.hpp"

#include <fstream>
#include <sstream>

#include <boost/regex.hpp>
#include <nlohmann/json.hpp>

namespace ivy::llm {

struct ScriptedMock::Compiled {
  std::vector<boost::regex> patterns;
};

ScriptedMock::ScriptedMock(std::vector<Rule> rules, std::string default_response)
    : rules_(std::move(rules)),
      default_response_(std::move(default_response)),
      compiled_(std::make_unique<Compiled>()) {
  for (const auto& rule : rules_) {
    try {
      compiled_->patterns.emplace_back(rule.pattern.empty() ? std::string("^") : rule.pattern,
                                       boost::regex::perl);
    } catch (const boost::regex_error& e) {
      throw Error(ErrorCode::kConfig,
                  "invalid mock pattern '" + rule.pattern + "': " + e.what());
    }
  }
}

ScriptedMock::~ScriptedMock() = default;

std::shared_ptr<ScriptedMock> ScriptedMock::from_json(std::string_view json) {
  try {
    auto in = nlohmann::json::parse(json);
    std::vector<Rule> rules;
    for (const auto& r : in.value("rules", nlohmann::json::array())) {
      Rule rule;
      if (r.contains("tag")) rule.tag = stage_tag_from(r.at("tag").get<std::string>());
      rule.pattern = r.value("pattern", "");
      rule.response = r.at("response").get<std::string>();
      rules.push_back(std::move(rule));
    }
    return std::make_shared<ScriptedMock>(std::move(rules),
                                          in.value("default", std::string(kDefaultResponse)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed mock script: ") + e.what());
  }
}

std::shared_ptr<ScriptedMock> ScriptedMock::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read mock script " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return from_json(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

namespace {

std::string expand(const std::string& tmpl, const ChatRequest& request,
                   const boost::smatch* match) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    auto open = tmpl.find("{{", pos);
    if (open == std::string::npos) break;
    auto close = tmpl.find("}}", open + 2);
    if (close == std::string::npos) break;
    out.append(tmpl, pos, open - pos);
    std::string key = tmpl.substr(open + 2, close - open - 2);
    if (key == "user") {
      out += request.user_message;
    } else if (key == "system") {
      out += request.system_prompt;
    } else if (key.size() == 1 && key[0] >= '0' && key[0] <= '9' && match) {
      auto group = static_cast<std::size_t>(key[0] - '0');
      if (group < match->size()) out += (*match)[static_cast<int>(group)].str();
    } else {
      out.append(tmpl, open, close + 2 - open);
    }
    pos = close + 2;
  }
  out.append(tmpl, pos, std::string::npos);
  return out;
}

}  // namespace

ChatResponse ScriptedMock::complete(const ChatRequest& request) const {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Rule& rule = rules_[i];
    if (rule.tag && *rule.tag != request.tag) continue;
    boost::smatch match;
    if (boost::regex_search(request.user_message, match, compiled_->patterns[i])) {
      return {expand(rule.response, request, &match), BackendKind::kMock, {}};
    }
  }
  return {expand(default_response_, request, nullptr), BackendKind::kMock, {}};
}

}  // namespace ivy::llm
