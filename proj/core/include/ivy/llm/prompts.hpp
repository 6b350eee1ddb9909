#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ivy::llm {

using PromptVars = std::map<std::string, std::string, std::less<>>;

// Prompt templates loaded from a directory of `<name>.txt` files. Templates
// use `{{var}}` placeholders; rendering an unknown placeholder is an error so
// a typo in an edited template fails loudly instead of sending a hole.
class PromptLibrary {
 public:
  // Names every pipeline deployment must provide.
  static const std::vector<std::string>& required_templates();

  // Loads every *.txt file in `dir`; throws kConfig when a required template
  // is missing.
  static PromptLibrary load(const std::filesystem::path& dir);

  PromptLibrary() = default;
  explicit PromptLibrary(std::map<std::string, std::string, std::less<>> templates);

  bool has(std::string_view name) const;
  const std::string& raw(std::string_view name) const;
  std::string render(std::string_view name, const PromptVars& vars = {}) const;

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

}  // namespace ivy::llm
