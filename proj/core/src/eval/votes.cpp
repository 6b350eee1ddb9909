#include "ivy/eval/votes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ivy/error.hpp"
#include "ivy/text.hpp"

namespace ivy::eval {

namespace {

using Row = std::vector<std::string>;

struct CsvRow {
  std::size_t line = 0;
  Row fields;
};

std::vector<CsvRow> read_csv(std::string_view csv) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  row.line = 1;
  auto end_field = [&] {
    row.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    bool blank = row.fields.size() == 1 && text::trim(row.fields[0]).empty();
    if (!blank) rows.push_back(std::move(row));
    row = CsvRow{};
    row.line = line;
  };
  for (std::size_t i = 0; i < csv.size(); ++i) {
    char c = csv[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      ++line;
      end_row();
    } else if (c != '\r') {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw Error(ErrorCode::kParse, "votes:" + std::to_string(line) + ": unterminated quote");
  if (field_started || !row.fields.empty()) end_row();
  return rows;
}

}  // namespace

std::vector<VoteRecord> parse_votes_csv(std::string_view csv) {
  auto rows = read_csv(csv);
  if (rows.empty()) throw Error(ErrorCode::kParse, "votes: missing header row");
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < rows[0].fields.size(); ++i) {
    column[text::to_lower(text::trim(rows[0].fields[i]))] = i;
  }
  for (const char* required : {"question_id", "category", "skill", "evaluator", "preferred"}) {
    if (!column.count(required)) {
      throw Error(ErrorCode::kParse, std::string("votes: header lacks column '") + required + "'");
    }
  }
  std::size_t metric_columns = 0;
  for (auto metric : kRatingMetrics) metric_columns += column.count(std::string(metric));
  if (metric_columns != 0 && metric_columns != kRatingMetrics.size()) {
    throw Error(ErrorCode::kParse, "votes: rating columns must name all five metrics or none");
  }

  std::vector<VoteRecord> votes;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto where = "votes:" + std::to_string(row.line) + ": ";
    if (row.fields.size() != rows[0].fields.size()) {
      throw Error(ErrorCode::kParse, where + "expected " + std::to_string(rows[0].fields.size()) +
                                         " fields, found " + std::to_string(row.fields.size()));
    }
    auto get = [&](const std::string& name) {
      return std::string(text::trim(row.fields[column.at(name)]));
    };
    VoteRecord v;
    v.question_id = get("question_id");
    v.category = get("category");
    v.skill = get("skill");
    v.evaluator_id = get("evaluator");
    if (v.question_id.empty() || v.category.empty() || v.evaluator_id.empty()) {
      throw Error(ErrorCode::kParse, where + "question_id, category and evaluator are required");
    }
    std::set<std::string> seen;
    for (const auto& part : text::split(get("preferred"), '|')) {
      std::string system(text::trim(part));
      if (system.empty()) continue;
      if (!seen.insert(system).second) {
        throw Error(ErrorCode::kParse, where + "system '" + system + "' listed twice");
      }
      v.preferred.push_back(std::move(system));
    }
    if (metric_columns) {
      std::size_t filled = 0;
      for (auto metric : kRatingMetrics) {
        auto value = get(std::string(metric));
        if (value.empty()) continue;
        ++filled;
        try {
          std::size_t used = 0;
          int rating = std::stoi(value, &used);
          if (used != value.size()) throw std::invalid_argument("trailing");
          v.ratings[std::string(metric)] = rating;
        } catch (const std::logic_error&) {
          throw Error(ErrorCode::kParse, where + "rating '" + value + "' is not an integer");
        }
      }
      if (filled != 0 && filled != kRatingMetrics.size()) {
        throw Error(ErrorCode::kParse, where + "a row rates all five metrics or none");
      }
    }
    votes.push_back(std::move(v));
  }
  return votes;
}

std::vector<VoteRecord> load_votes(const std::filesystem::path& path) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) {
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error(ErrorCode::kNotFound, "no .csv vote files in " + path.string());
  } else {
    files.push_back(path);
  }
  std::vector<VoteRecord> votes;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot read votes " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      auto part = parse_votes_csv(buf.str());
      votes.insert(votes.end(), part.begin(), part.end());
    } catch (const Error& e) {
      throw Error(e.code(), file.string() + ": " + e.what());
    }
  }
  return votes;
}

double agreement_index(const std::vector<VoteRecord>& votes, std::string_view system) {
  if (votes.empty()) throw Error(ErrorCode::kInvalidArgument, "agreement index needs votes");
  auto count = std::count_if(votes.begin(), votes.end(), [&](const VoteRecord& v) {
    return std::find(v.preferred.begin(), v.preferred.end(), system) != v.preferred.end();
  });
  double pct = 100.0 * static_cast<double>(count) / static_cast<double>(votes.size());
  return std::round(pct * 100.0) / 100.0;
}

VoteTally tally_votes(const std::vector<VoteRecord>& votes) {
  VoteTally tally;
  tally.records = votes.size();
  for (const auto& v : votes) {
    ++tally.records_by_category[v.category];
    ++tally.records_by_skill[v.skill];
    for (const auto& system : v.preferred) {
      ++tally.totals[system];
      ++tally.by_category[system][v.category];
      ++tally.by_skill[system][v.skill];
    }
  }
  return tally;
}

std::vector<std::string> systems_in(const std::vector<VoteRecord>& votes) {
  std::set<std::string> systems;
  for (const auto& v : votes) systems.insert(v.preferred.begin(), v.preferred.end());
  return {systems.begin(), systems.end()};
}

}  // namespace ivy::eval
