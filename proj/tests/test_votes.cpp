#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "ivy/eval/votes.hpp"
#include "generators.hpp"
#include "support.hpp"

namespace ivy::eval {
namespace {

std::vector<VoteRecord> shipped_votes() {
  return load_votes(testing::source_path("fixtures/votes/votes.csv"));
}

TEST(Votes, ShippedFixtureAgreementIndices) {
  auto votes = shipped_votes();
  ASSERT_EQ(votes.size(), 140u);
  EXPECT_DOUBLE_EQ(agreement_index(votes, "Ivy"), 82.14);
  EXPECT_DOUBLE_EQ(agreement_index(votes, "RAG-Benchmark"), 53.57);
  EXPECT_EQ(systems_in(votes), (std::vector<std::string>{"Ivy", "RAG-Benchmark"}));
}

TEST(Votes, ShippedFixtureTallies) {
  auto tally = tally_votes(shipped_votes());
  EXPECT_EQ(tally.records, 140u);
  EXPECT_EQ(tally.totals.at("Ivy"), 115);
  EXPECT_EQ(tally.totals.at("RAG-Benchmark"), 75);

  const std::map<std::string, std::array<int, 3>> categories = {
      {"Cannot Answer", {36, 13, 33}}, {"Knowledge", {24, 19, 19}}, {"Method", {28, 15, 22}},
      {"Student", {24, 16, 20}},       {"Task", {28, 12, 21}}};
  for (const auto& [name, want] : categories) {
    EXPECT_EQ(tally.records_by_category.at(name), want[0]) << name;
    EXPECT_EQ(tally.by_category.at("RAG-Benchmark").at(name), want[1]) << name;
    EXPECT_EQ(tally.by_category.at("Ivy").at(name), want[2]) << name;
  }
  const std::map<std::string, std::array<int, 3>> skills = {
      {"Classification", {24, 13, 19}},
      {"Incremental Concept Learning", {24, 11, 21}},
      {"Means-End Analysis", {22, 10, 20}},
      {"Planning", {22, 14, 14}},
      {"Resolution Theorem Proving", {26, 15, 23}},
      {"Semantic Networks", {22, 12, 18}}};
  for (const auto& [name, want] : skills) {
    EXPECT_EQ(tally.records_by_skill.at(name), want[0]) << name;
    EXPECT_EQ(tally.by_skill.at("RAG-Benchmark").at(name), want[1]) << name;
    EXPECT_EQ(tally.by_skill.at("Ivy").at(name), want[2]) << name;
  }
}

TEST(Votes, AgreementIndexOracle) {
  testing::Rng rng(9);
  const std::vector<std::string> systems = {"A", "B", "C"};
  for (int round = 0; round < 100; ++round) {
    std::vector<VoteRecord> votes;
    std::map<std::string, int> counts;
    std::size_t n = testing::uniform(rng, 1, 60);
    for (std::size_t i = 0; i < n; ++i) {
      VoteRecord r{"Q" + std::to_string(i), "Task", "S", "E", {}, {}};
      for (const auto& s : systems) {
        if (testing::coin(rng)) {
          r.preferred.push_back(s);
          ++counts[s];
        }
      }
      votes.push_back(r);
    }
    for (const auto& s : systems) {
      double want = std::round(100.0 * counts[s] / static_cast<double>(n) * 100.0) / 100.0;
      EXPECT_DOUBLE_EQ(agreement_index(votes, s), want);
      EXPECT_GE(agreement_index(votes, s), 0.0);
      EXPECT_LE(agreement_index(votes, s), 100.0);
    }
  }
  EXPECT_THROW(agreement_index({}, "A"), Error);
}

TEST(VotesCsv, QuotedFieldsAndRatings) {
  auto votes = parse_votes_csv(
      "question_id,category,skill,evaluator,preferred,correctness,completeness,confidence,"
      "comprehensibility,compactness\n"
      "Q1,\"Cannot Answer\",\"Means-End Analysis\",E1,\"A|B\",5,4,3,2,1\n"
      "Q2,Task,Planning,E2,,,,,,\r\n");
  ASSERT_EQ(votes.size(), 2u);
  EXPECT_EQ(votes[0].category, "Cannot Answer");
  EXPECT_EQ(votes[0].preferred, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(votes[0].ratings.at("correctness"), 5);
  EXPECT_EQ(votes[0].ratings.at("compactness"), 1);
  EXPECT_TRUE(votes[1].preferred.empty());
  EXPECT_TRUE(votes[1].ratings.empty());
}

TEST(VotesCsv, MalformedInputNamesTheLine) {
  auto message_of = [](const std::string& csv) -> std::string {
    try {
      parse_votes_csv(csv);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
      return e.what();
    }
    return "no error";
  };
  EXPECT_NE(message_of("question_id,category,skill,preferred\nQ1,T,S,A\n"), "no error");
  EXPECT_NE(message_of("question_id,category,skill,evaluator,preferred\nQ1,T,S\n").find("votes:2:"),
            std::string::npos);
  EXPECT_NE(message_of("question_id,category,skill,evaluator,preferred,correctness\nQ1,T,S,E,A,x\n"),
            "no error");
  EXPECT_NE(message_of("question_id,category,skill,evaluator,preferred\nQ1,\"T,S,E,A\n"), "no error");
}

TEST(VotesCsv, DirectoryLoadsEveryCsvInNameOrder) {
  testing::TempDir tmp;
  const std::string header = "question_id,category,skill,evaluator,preferred\n";
  testing::write_file(tmp / "b.csv", header + "Q2,Task,S,E,A\n");
  testing::write_file(tmp / "a.csv", header + "Q1,Task,S,E,B\n");
  testing::write_file(tmp / "notes.txt", "ignored");
  auto votes = load_votes(tmp.path());
  ASSERT_EQ(votes.size(), 2u);
  EXPECT_EQ(votes[0].question_id, "Q1");
  EXPECT_EQ(votes[1].question_id, "Q2");
  EXPECT_THROW(load_votes(tmp / "missing.csv"), Error);
}

}  // namespace
}  // namespace ivy::eval
