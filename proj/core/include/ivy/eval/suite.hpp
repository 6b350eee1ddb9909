#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivy/docs/corpus.hpp"

namespace ivy::eval {

enum class QuestionCategory { kTask, kMethod, kKnowledge, kStudent, kCannotAnswer };

// "task", "method", "knowledge", "student", "cannot-answer"
std::string_view to_string(QuestionCategory category);
// Also accepts the display names ("Task", "Cannot Answer", ...).
QuestionCategory question_category_from(std::string_view s);
// "Task", "Method", "Knowledge", "Student", "Cannot Answer"
std::string_view display_name(QuestionCategory category);

// Component kind a question of this category is expected to draw on;
// none for student and cannot-answer questions.
std::optional<docs::ComponentKind> expected_kind(QuestionCategory category);

struct VerificationQuestion {
  std::string id;
  std::string question;
  QuestionCategory category = QuestionCategory::kTask;
  std::optional<std::string> skill_id;           // none for cannot-answer
  std::optional<std::string> expected_response;  // none for cannot-answer

  bool operator==(const VerificationQuestion&) const = default;
};

// Suite file:
//   {"name": "...", "questions": [{"id", "question", "category",
//     "skill_id"?, "expected_response"?}, ...]}
struct Suite {
  std::string name;
  std::vector<VerificationQuestion> questions;

  // Throws kParse on malformed JSON, kValidation when a cannot-answer
  // question carries a skill or expected response, when any other question
  // lacks a skill, or when ids repeat.
  static Suite from_json(std::string_view json);
  static Suite load(const std::filesystem::path& path);
  std::string to_json() const;

  bool operator==(const Suite&) const = default;
};

}  // namespace ivy::eval
