#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ivy::eval {

inline constexpr std::array<std::string_view, 5> kRatingMetrics = {
    "correctness", "completeness", "confidence", "comprehensibility", "compactness"};

// One evaluator's blind preference for one question.
struct VoteRecord {
  std::string question_id;
  std::string category;  // e.g. "Task", "Cannot Answer"
  std::string skill;     // e.g. "Planning"
  std::string evaluator_id;
  std::vector<std::string> preferred;  // systems marked ideal; may be empty
  std::map<std::string, int> ratings;  // empty, or exactly kRatingMetrics

  bool operator==(const VoteRecord&) const = default;
};

// CSV with a header row. Required columns: question_id, category, skill,
// evaluator, preferred. `preferred` lists systems separated by '|'.
// Optional columns named after kRatingMetrics hold integer ratings; a row
// rates either all five metrics or none. Fields may be double-quoted.
// Throws kParse with the line number on malformed input.
std::vector<VoteRecord> parse_votes_csv(std::string_view csv);

// A single CSV file, or every *.csv in a directory in file-name order.
std::vector<VoteRecord> load_votes(const std::filesystem::path& path);

// 100 * (records preferring `system`) / (total records), rounded to 2
// decimals. Throws kInvalidArgument for an empty vote list.
double agreement_index(const std::vector<VoteRecord>& votes, std::string_view system);

struct VoteTally {
  std::size_t records = 0;
  std::map<std::string, int> totals;                                // system -> votes
  std::map<std::string, std::map<std::string, int>> by_category;   // system -> category -> votes
  std::map<std::string, std::map<std::string, int>> by_skill;      // system -> skill -> votes
  std::map<std::string, int> records_by_category;
  std::map<std::string, int> records_by_skill;
};

VoteTally tally_votes(const std::vector<VoteRecord>& votes);

// Every system named in any record, sorted.
std::vector<std::string> systems_in(const std::vector<VoteRecord>& votes);

}  // namespace ivy::eval
