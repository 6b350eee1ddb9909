#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ivy/tmk/model.hpp"

namespace ivy::tmk {

enum class Severity { kError, kWarning };

// Fixed defect vocabulary. Every code has a stable kebab-case spelling used
// by the CLI and the HTTP error payloads.
enum class DefectCode {
  kEmptySkillId,
  kNoRootTask,
  kDuplicateId,
  kEmptyGoal,
  kDanglingMethodRef,
  kDanglingSubgoal,
  kUnknownConceptReference,
  kBadStartState,
  kUndefinedState,
  kNondeterministicTransition,
  kUnreachableState,
  kNoReachableAccepting,
  kDanglingRelation,
  kDuplicateProperty,
  kHierarchyCycle,
  kUnusedMethod,     // warning
  kUnreachableTask,  // warning
};

inline constexpr DefectCode kAllDefectCodes[] = {
    DefectCode::kEmptySkillId,        DefectCode::kNoRootTask,
    DefectCode::kDuplicateId,         DefectCode::kEmptyGoal,
    DefectCode::kDanglingMethodRef,   DefectCode::kDanglingSubgoal,
    DefectCode::kUnknownConceptReference, DefectCode::kBadStartState,
    DefectCode::kUndefinedState,      DefectCode::kNondeterministicTransition,
    DefectCode::kUnreachableState,    DefectCode::kNoReachableAccepting,
    DefectCode::kDanglingRelation,    DefectCode::kDuplicateProperty,
    DefectCode::kHierarchyCycle,      DefectCode::kUnusedMethod,
    DefectCode::kUnreachableTask,
};

std::string_view to_string(DefectCode code);
std::string_view to_string(Severity severity);
Severity severity_of(DefectCode code);

struct Defect {
  Severity severity;
  DefectCode code;
  std::string location;  // e.g. "method/pop/state/s1"
  std::string message;
};

struct ValidationReport {
  std::vector<Defect> defects;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool accepted() const { return error_count() == 0; }

  // {"errors": n, "warnings": n, "defects": [{severity, code, location, message}]}
  std::string to_json() const;
};

// Checks every structural invariant of the model. Total: never throws.
ValidationReport validate(const TmkModel& model);

// A model that passed validation with zero errors. Downstream modules take
// this type so an unchecked model cannot reach them.
class ValidatedModel {
 public:
  // Throws Error(kValidation) listing the error defects.
  static ValidatedModel from(TmkModel model);

  const TmkModel& model() const noexcept { return *model_; }
  const TmkModel* operator->() const noexcept { return model_.get(); }
  const ValidationReport& report() const noexcept { return *report_; }

 private:
  ValidatedModel(std::shared_ptr<const TmkModel> model,
                 std::shared_ptr<const ValidationReport> report)
      : model_(std::move(model)), report_(std::move(report)) {}

  std::shared_ptr<const TmkModel> model_;
  std::shared_ptr<const ValidationReport> report_;
};

// Longest task -> method -> sub-goal task chain, counted in sub-goal edges.
int hierarchy_depth(const ValidatedModel& model);

}  // namespace ivy::tmk
