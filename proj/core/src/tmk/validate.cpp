#include "ivy/tmk/validate.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ivy/error.hpp"
#include "ivy/text.hpp"

namespace ivy::tmk {

std::string_view to_string(DefectCode code) {
  switch (code) {
    case DefectCode::kEmptySkillId: return "empty-skill-id";
    case DefectCode::kNoRootTask: return "no-root-task";
    case DefectCode::kDuplicateId: return "duplicate-id";
    case DefectCode::kEmptyGoal: return "empty-goal";
    case DefectCode::kDanglingMethodRef: return "dangling-method-ref";
    case DefectCode::kDanglingSubgoal: return "dangling-subgoal";
    case DefectCode::kUnknownConceptReference: return "unknown-concept-reference";
    case DefectCode::kBadStartState: return "bad-start-state";
    case DefectCode::kUndefinedState: return "undefined-state";
    case DefectCode::kNondeterministicTransition: return "nondeterministic-transition";
    case DefectCode::kUnreachableState: return "unreachable-state";
    case DefectCode::kNoReachableAccepting: return "no-reachable-accepting-state";
    case DefectCode::kDanglingRelation: return "dangling-relation";
    case DefectCode::kDuplicateProperty: return "duplicate-property";
    case DefectCode::kHierarchyCycle: return "hierarchy-cycle";
    case DefectCode::kUnusedMethod: return "unused-method";
    case DefectCode::kUnreachableTask: return "unreachable-task";
  }
  return "unknown";
}

std::string_view to_string(Severity severity) {
  return severity == Severity::kError ? "error" : "warning";
}

Severity severity_of(DefectCode code) {
  switch (code) {
    case DefectCode::kUnusedMethod:
    case DefectCode::kUnreachableTask:
      return Severity::kWarning;
    default:
      return Severity::kError;
  }
}

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(defects.begin(), defects.end(), [](const Defect& d) {
    return d.severity == Severity::kError;
  }));
}

std::size_t ValidationReport::warning_count() const {
  return defects.size() - error_count();
}

std::string ValidationReport::to_json() const {
  nlohmann::json out;
  out["errors"] = error_count();
  out["warnings"] = warning_count();
  out["defects"] = nlohmann::json::array();
  for (const auto& d : defects) {
    out["defects"].push_back({{"severity", std::string(to_string(d.severity))},
                              {"code", std::string(to_string(d.code))},
                              {"location", d.location},
                              {"message", d.message}});
  }
  return out.dump(2);
}

namespace {

class Checker {
 public:
  explicit Checker(const TmkModel& model) : m_(model) {}

  ValidationReport run() {
    if (text::trim(m_.skill_id).empty()) {
      add(DefectCode::kEmptySkillId, "skill", "skill id is empty");
    }
    check_duplicates();
    check_roots();
    for (const auto& task : m_.tasks) check_task(task);
    for (const auto& method : m_.methods) check_method(method);
    check_knowledge();
    check_hierarchy();
    check_usage();
    return std::move(report_);
  }

 private:
  void add(DefectCode code, std::string location, std::string message) {
    report_.defects.push_back({severity_of(code), code, std::move(location), std::move(message)});
  }

  template <typename T, typename Key>
  void duplicates_in(const std::vector<T>& items, Key key, const std::string& kind,
                     const std::string& prefix) {
    std::set<std::string> seen;
    for (const auto& item : items) {
      const std::string& id = item.*key;
      if (!seen.insert(id).second) {
        add(DefectCode::kDuplicateId, prefix + kind + "/" + id,
            kind + " id '" + id + "' is defined more than once");
      }
    }
  }

  void check_duplicates() {
    duplicates_in(m_.tasks, &Task::task_id, "task", "");
    duplicates_in(m_.methods, &Method::method_id, "method", "");
    duplicates_in(m_.knowledge.concepts, &Concept::concept_id, "concept", "knowledge/");
    for (const auto& method : m_.methods) {
      duplicates_in(method.organizer.states, &State::state_id, "state",
                    "method/" + method.method_id + "/");
    }
  }

  void check_roots() {
    if (m_.root_tasks.empty()) {
      add(DefectCode::kNoRootTask, "skill", "no root task is declared");
      return;
    }
    for (const auto& root : m_.root_tasks) {
      if (!m_.find_task(root)) {
        add(DefectCode::kNoRootTask, "skill/root/" + root,
            "root '" + root + "' does not name a defined task");
      }
    }
  }

  bool concept_exists(const std::string& ref) const {
    return std::any_of(m_.knowledge.concepts.begin(), m_.knowledge.concepts.end(),
                       [&](const Concept& c) {
                         return text::iequals(c.concept_id, ref) || text::iequals(c.name, ref);
                       });
  }

  void check_conditions(const std::vector<std::string>& exprs, const std::string& location) {
    for (const auto& expr : exprs) {
      for (const auto& ref : condition_references(expr)) {
        if (!concept_exists(ref)) {
          add(DefectCode::kUnknownConceptReference, location,
              "condition '" + expr + "' references undeclared concept '" + ref + "'");
        }
      }
    }
  }

  void check_task(const Task& task) {
    const std::string loc = "task/" + task.task_id;
    if (text::trim(task.goal).empty()) {
      add(DefectCode::kEmptyGoal, loc, "task '" + task.task_id + "' has an empty goal");
    }
    for (const auto& ref : task.method_refs) {
      if (!m_.find_method(ref)) {
        add(DefectCode::kDanglingMethodRef, loc + "/method/" + ref,
            "task '" + task.task_id + "' references undefined method '" + ref + "'");
      }
    }
    check_conditions(task.givens, loc + "/given");
    check_conditions(task.makes, loc + "/makes");
  }

  void check_method(const Method& method) {
    const Fsm& fsm = method.organizer;
    const std::string loc = "method/" + method.method_id;
    std::set<std::string> defined;
    for (const auto& s : fsm.states) defined.insert(s.state_id);

    for (const auto& s : fsm.states) {
      if (s.sub_goal && !m_.find_task(*s.sub_goal)) {
        add(DefectCode::kDanglingSubgoal, loc + "/state/" + s.state_id,
            "state '" + s.state_id + "' has sub-goal '" + *s.sub_goal +
                "' which names no defined task");
      }
    }

    for (const auto& t : fsm.transitions) {
      for (const auto* end : {&t.from, &t.to}) {
        if (!defined.count(*end)) {
          add(DefectCode::kUndefinedState, loc + "/transition/" + t.from + "/" + t.condition,
              "transition (" + t.from + ", " + t.condition + ", " + t.to +
                  ") uses undefined state '" + *end + "'");
        }
      }
    }
    for (const auto& a : fsm.accepting_states) {
      if (!defined.count(a)) {
        add(DefectCode::kUndefinedState, loc + "/accept/" + a,
            "accepting state '" + a + "' is not defined");
      }
    }

    std::map<std::pair<std::string, std::string>, int> arity;
    for (const auto& t : fsm.transitions) {
      if (++arity[{t.from, t.condition}] == 2) {
        add(DefectCode::kNondeterministicTransition, loc + "/transition/" + t.from + "/" + t.condition,
            "state '" + t.from + "' has more than one transition on '" + t.condition + "'");
      }
    }

    if (!defined.count(fsm.start_state)) {
      add(DefectCode::kBadStartState, loc + "/start",
          "start state '" + fsm.start_state + "' is not defined");
      return;
    }

    std::set<std::string> reached{fsm.start_state};
    std::deque<std::string> frontier{fsm.start_state};
    while (!frontier.empty()) {
      auto current = frontier.front();
      frontier.pop_front();
      for (const auto& t : fsm.transitions) {
        if (t.from == current && defined.count(t.to) && reached.insert(t.to).second) {
          frontier.push_back(t.to);
        }
      }
    }
    for (const auto& s : fsm.states) {
      if (!reached.count(s.state_id)) {
        add(DefectCode::kUnreachableState, loc + "/state/" + s.state_id,
            "state '" + s.state_id + "' is unreachable from start state '" + fsm.start_state + "'");
      }
    }
    bool accepting_reached = std::any_of(fsm.accepting_states.begin(), fsm.accepting_states.end(),
                                         [&](const std::string& a) { return reached.count(a) > 0; });
    if (!accepting_reached) {
      add(DefectCode::kNoReachableAccepting, loc,
          "no accepting state is reachable from start state '" + fsm.start_state + "'");
    }
  }

  void check_knowledge() {
    const Knowledge& k = m_.knowledge;
    for (const auto& c : k.concepts) {
      std::set<std::string> names;
      for (const auto& p : c.properties) {
        if (!names.insert(p.name).second) {
          add(DefectCode::kDuplicateProperty, "knowledge/concept/" + c.concept_id + "/" + p.name,
              "concept '" + c.concept_id + "' declares property '" + p.name + "' twice");
        }
      }
    }
    for (const auto& r : k.relations) {
      for (const auto* end : {&r.subject, &r.object}) {
        if (!concept_exists(*end)) {
          add(DefectCode::kDanglingRelation,
              "knowledge/relation/" + r.subject + "/" + r.relation + "/" + r.object,
              "relation endpoint '" + *end + "' is not a declared concept");
        }
      }
    }
    check_conditions(k.ground_truths, "knowledge/truth");
  }

  // Sub-goal edges task -> task through the task's methods.
  std::vector<std::string> children(const Task& task) const {
    std::vector<std::string> out;
    for (const auto& ref : task.method_refs) {
      const Method* method = m_.find_method(ref);
      if (!method) continue;
      for (const auto& s : method->organizer.states) {
        if (s.sub_goal && m_.find_task(*s.sub_goal)) out.push_back(*s.sub_goal);
      }
    }
    return out;
  }

  void check_hierarchy() {
    enum class Mark { kNew, kActive, kDone };
    std::unordered_map<std::string, Mark> mark;
    std::set<std::pair<std::string, std::string>> reported;
    std::function<void(const Task&)> visit = [&](const Task& task) {
      mark[task.task_id] = Mark::kActive;
      for (const auto& child_id : children(task)) {
        auto state = mark.count(child_id) ? mark[child_id] : Mark::kNew;
        if (state == Mark::kActive) {
          if (reported.insert({task.task_id, child_id}).second) {
            add(DefectCode::kHierarchyCycle, "task/" + task.task_id,
                "decomposition of task '" + task.task_id + "' leads back to task '" + child_id +
                    "'");
          }
        } else if (state == Mark::kNew) {
          visit(*m_.find_task(child_id));
        }
      }
      mark[task.task_id] = Mark::kDone;
    };
    for (const auto& task : m_.tasks) {
      if (!mark.count(task.task_id)) visit(task);
    }
  }

  void check_usage() {
    std::set<std::string> used;
    for (const auto& task : m_.tasks) used.insert(task.method_refs.begin(), task.method_refs.end());
    for (const auto& method : m_.methods) {
      if (!used.count(method.method_id)) {
        add(DefectCode::kUnusedMethod, "method/" + method.method_id,
            "method '" + method.method_id + "' is not referenced by any task");
      }
    }

    std::vector<std::string> roots;
    for (const auto& r : m_.root_tasks) {
      if (m_.find_task(r)) roots.push_back(r);
    }
    if (roots.empty()) return;
    std::set<std::string> reached(roots.begin(), roots.end());
    std::deque<std::string> frontier(roots.begin(), roots.end());
    while (!frontier.empty()) {
      const Task* task = m_.find_task(frontier.front());
      frontier.pop_front();
      for (const auto& child : children(*task)) {
        if (reached.insert(child).second) frontier.push_back(child);
      }
    }
    for (const auto& task : m_.tasks) {
      if (!reached.count(task.task_id)) {
        add(DefectCode::kUnreachableTask, "task/" + task.task_id,
            "task '" + task.task_id + "' is not reachable from any root task");
      }
    }
  }

  const TmkModel& m_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const TmkModel& model) {
  return Checker(model).run();
}

ValidatedModel ValidatedModel::from(TmkModel model) {
  auto report = std::make_shared<const ValidationReport>(validate(model));
  if (!report->accepted()) {
    std::string msg = "model '" + model.skill_id + "' has " +
                      std::to_string(report->error_count()) + " validation error(s):";
    for (const auto& d : report->defects) {
      if (d.severity == Severity::kError) {
        msg += " " + std::string(to_string(d.code)) + " at " + d.location + ";";
      }
    }
    throw Error(ErrorCode::kValidation, msg);
  }
  return ValidatedModel(std::make_shared<const TmkModel>(std::move(model)), std::move(report));
}

int hierarchy_depth(const ValidatedModel& validated) {
  const TmkModel& m = validated.model();
  std::unordered_map<std::string, int> memo;
  std::function<int(const Task&)> depth = [&](const Task& task) -> int {
    if (auto it = memo.find(task.task_id); it != memo.end()) return it->second;
    int best = 0;
    for (const auto& ref : task.method_refs) {
      const Method* method = m.find_method(ref);
      for (const auto& s : method->organizer.states) {
        if (s.sub_goal) best = std::max(best, 1 + depth(*m.find_task(*s.sub_goal)));
      }
    }
    memo[task.task_id] = best;
    return best;
  };
  int result = 0;
  for (const auto& task : m.tasks) result = std::max(result, depth(task));
  return result;
}

}  // namespace ivy::tmk
