#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "ivy/error.hpp"
#include "ivy/tmk/model.hpp"

namespace ivy::tmk {

// Syntax errors and missing mandatory fields. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& detail,
             const std::string& source = {});

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

// Parses one `.tmk` skill document. Structure only; cross references are
// checked by validate(). The grammar is documented in docs/tmk-format.md.
TmkModel parse_tmk(std::string_view source);

// Canonical `.tmk` rendering. parse_tmk(serialize_tmk(m)) == m for any m.
std::string serialize_tmk(const TmkModel& model);

TmkModel load_tmk_file(const std::string& path);

}  // namespace ivy::tmk
