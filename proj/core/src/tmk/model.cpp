#include "ivy/tmk/model.hpp"

#include <algorithm>
#include <cctype>

#include "ivy/text.hpp"

namespace ivy::tmk {

namespace {

template <typename T, typename Key>
const T* find_by(const std::vector<T>& items, const std::string& id, Key key) {
  auto it = std::find_if(items.begin(), items.end(),
                         [&](const T& item) { return item.*key == id; });
  return it == items.end() ? nullptr : &*it;
}

}  // namespace

const State* Fsm::find_state(const std::string& id) const {
  return find_by(states, id, &State::state_id);
}

const Concept* Knowledge::find_concept(const std::string& id) const {
  return find_by(concepts, id, &Concept::concept_id);
}

const Task* TmkModel::find_task(const std::string& id) const {
  return find_by(tasks, id, &Task::task_id);
}

const Method* TmkModel::find_method(const std::string& id) const {
  return find_by(methods, id, &Method::method_id);
}

std::vector<std::string> condition_references(const std::string& expression) {
  std::vector<std::string> refs;
  std::size_t pos = 0;
  while ((pos = expression.find('(', pos)) != std::string::npos) {
    // Only a call when an identifier sits directly before the parenthesis.
    bool is_call = pos > 0 && (std::isalnum(static_cast<unsigned char>(expression[pos - 1])) ||
                               expression[pos - 1] == '_');
    auto close = expression.find(')', pos);
    if (close == std::string::npos) break;
    if (is_call) {
      auto args = expression.substr(pos + 1, close - pos - 1);
      if (args.find('(') == std::string::npos) {
        for (const auto& arg : text::split(args, ',')) {
          auto trimmed = text::trim(arg);
          if (!trimmed.empty()) refs.emplace_back(trimmed);
        }
      }
    }
    pos = pos + 1;
  }
  return refs;
}

}  // namespace ivy::tmk
