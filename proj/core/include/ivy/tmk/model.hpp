#pragma once

#include <optional>
#include <string>
#include <vector>

// Task-Method-Knowledge skill models.
//
// A model is plain data: parsing produces it, validation inspects it, and
// nothing mutates it afterwards. Cross references (method ids on tasks,
// sub-goal task ids on states, concept ids on relations) are stored by id and
// resolved by the validator.
namespace ivy::tmk {

struct State {
  std::string state_id;
  std::string description;
  std::optional<std::string> sub_goal;  // task id

  bool operator==(const State&) const = default;
};

struct Transition {
  std::string from;
  std::string condition;
  std::string to;

  bool operator==(const Transition&) const = default;
};

// Organizer of a method. Intended to be deterministic; see validate().
struct Fsm {
  std::vector<State> states;
  std::string start_state;
  std::vector<std::string> accepting_states;
  std::vector<Transition> transitions;

  const State* find_state(const std::string& id) const;

  bool operator==(const Fsm&) const = default;
};

struct Task {
  std::string task_id;
  std::string name;
  std::string goal;
  std::vector<std::string> inputs;
  std::vector<std::string> givens;
  std::vector<std::string> makes;
  std::vector<std::string> outputs;
  std::vector<std::string> method_refs;

  bool operator==(const Task&) const = default;
};

struct Method {
  std::string method_id;
  std::string name;
  Fsm organizer;

  bool operator==(const Method&) const = default;
};

struct Property {
  std::string name;
  std::string semantic_type;

  bool operator==(const Property&) const = default;
};

struct Concept {
  std::string concept_id;
  std::string name;
  std::vector<Property> properties;

  bool operator==(const Concept&) const = default;
};

struct Relation {
  std::string subject;
  std::string relation;
  std::string object;

  bool operator==(const Relation&) const = default;
};

struct Knowledge {
  std::vector<Concept> concepts;
  std::vector<Relation> relations;
  std::vector<std::string> ground_truths;

  const Concept* find_concept(const std::string& id) const;

  bool operator==(const Knowledge&) const = default;
};

struct TmkModel {
  std::string skill_id;
  std::string skill_name;
  std::vector<std::string> root_tasks;
  std::vector<Task> tasks;
  std::vector<Method> methods;
  Knowledge knowledge;

  const Task* find_task(const std::string& id) const;
  const Method* find_method(const std::string& id) const;

  bool operator==(const TmkModel&) const = default;
};

// Concept references inside a condition expression: the comma-separated
// arguments of every `Predicate(arg, ...)` call. "Painted(Ladder) &
// On(Robot, Floor)" references Ladder, Robot and Floor. Text without calls
// references nothing.
std::vector<std::string> condition_references(const std::string& expression);

}  // namespace ivy::tmk
