#include "ivy/eval/suite.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ivy/error.hpp"
#include "ivy/text.hpp"

namespace ivy::eval {

using nlohmann::json;

std::string_view to_string(QuestionCategory category) {
  switch (category) {
    case QuestionCategory::kTask: return "task";
    case QuestionCategory::kMethod: return "method";
    case QuestionCategory::kKnowledge: return "knowledge";
    case QuestionCategory::kStudent: return "student";
    case QuestionCategory::kCannotAnswer: return "cannot-answer";
  }
  return "task";
}

std::string_view display_name(QuestionCategory category) {
  switch (category) {
    case QuestionCategory::kTask: return "Task";
    case QuestionCategory::kMethod: return "Method";
    case QuestionCategory::kKnowledge: return "Knowledge";
    case QuestionCategory::kStudent: return "Student";
    case QuestionCategory::kCannotAnswer: return "Cannot Answer";
  }
  return "Task";
}

QuestionCategory question_category_from(std::string_view s) {
  for (auto c : {QuestionCategory::kTask, QuestionCategory::kMethod, QuestionCategory::kKnowledge,
                 QuestionCategory::kStudent, QuestionCategory::kCannotAnswer}) {
    if (text::iequals(s, to_string(c)) || text::iequals(s, display_name(c))) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown question category '" + std::string(s) + "'");
}

std::optional<docs::ComponentKind> expected_kind(QuestionCategory category) {
  switch (category) {
    case QuestionCategory::kTask: return docs::ComponentKind::kTask;
    case QuestionCategory::kMethod: return docs::ComponentKind::kMethod;
    case QuestionCategory::kKnowledge: return docs::ComponentKind::kKnowledge;
    default: return std::nullopt;
  }
}

Suite Suite::from_json(std::string_view text) {
  Suite suite;
  try {
    auto in = json::parse(text);
    suite.name = in.value("name", "");
    for (const auto& q : in.at("questions")) {
      VerificationQuestion v;
      v.id = q.at("id").get<std::string>();
      v.question = q.at("question").get<std::string>();
      v.category = question_category_from(q.at("category").get<std::string>());
      if (q.contains("skill_id") && !q.at("skill_id").is_null()) {
        v.skill_id = q.at("skill_id").get<std::string>();
      }
      if (q.contains("expected_response") && !q.at("expected_response").is_null()) {
        v.expected_response = q.at("expected_response").get<std::string>();
      }
      suite.questions.push_back(std::move(v));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed suite: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, std::string("malformed suite: ") + e.what());
  }
  std::set<std::string> ids;
  for (const auto& q : suite.questions) {
    if (!ids.insert(q.id).second) {
      throw Error(ErrorCode::kValidation, "suite question id '" + q.id + "' repeats");
    }
    if (text::trim(q.question).empty()) {
      throw Error(ErrorCode::kValidation, "suite question " + q.id + " has no text");
    }
    bool cannot = q.category == QuestionCategory::kCannotAnswer;
    if (cannot && (q.skill_id || q.expected_response)) {
      throw Error(ErrorCode::kValidation,
                  "cannot-answer question " + q.id + " must not carry a skill or expected response");
    }
    if (!cannot && (!q.skill_id || q.skill_id->empty())) {
      throw Error(ErrorCode::kValidation, "question " + q.id + " needs a skill_id");
    }
  }
  return suite;
}

Suite Suite::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read suite " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string Suite::to_json() const {
  json qs = json::array();
  for (const auto& q : questions) {
    json item = {{"id", q.id}, {"question", q.question}, {"category", std::string(eval::to_string(q.category))}};
    if (q.skill_id) item["skill_id"] = *q.skill_id;
    if (q.expected_response) item["expected_response"] = *q.expected_response;
    qs.push_back(std::move(item));
  }
  return json{{"name", name}, {"questions", qs}}.dump(2);
}

}  // namespace ivy::eval
