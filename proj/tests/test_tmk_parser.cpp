#include <gtest/gtest.h>

#include "generators.hpp"
#include "support.hpp"

namespace ivy::tmk {
namespace {

using testing::read_file;
using testing::source_path;

TEST(Parser, LoadsPlanningModel) {
  auto m = load_tmk_file(source_path("data/models/partial-order-planning.tmk").string());
  EXPECT_EQ(m.skill_id, "partial-order-planning");
  EXPECT_EQ(m.skill_name, "Partial Order Planning");
  ASSERT_EQ(m.root_tasks, std::vector<std::string>{"paint-ladder-and-ceiling"});
  ASSERT_EQ(m.tasks.size(), 5u);
  const Task* root = m.find_task("paint-ladder-and-ceiling");
  ASSERT_NE(root, nullptr);
  EXPECT_EQ(root->name, "paint ladder and ceiling");
  EXPECT_EQ(root->givens,
            (std::vector<std::string>{"On(Robot, Floor)", "Dry(Ladder)", "Dry(Ceiling)"}));
  EXPECT_EQ(root->makes, std::vector<std::string>{"Painted(Ladder) & Painted(Ceiling)"});
  ASSERT_EQ(m.methods.size(), 2u);
  const Method* pop = m.find_method("partial-order-planning");
  ASSERT_NE(pop, nullptr);
  EXPECT_EQ(pop->organizer.start_state, "s0");
  EXPECT_EQ(pop->organizer.states.size(), 5u);
  EXPECT_EQ(pop->organizer.find_state("s3")->sub_goal, std::optional<std::string>("resolve-conflicts"));
  EXPECT_EQ(m.knowledge.concepts.size(), 9u);
  EXPECT_EQ(m.knowledge.relations.size(), 7u);
  EXPECT_EQ(m.knowledge.ground_truths.size(), 4u);
  EXPECT_NE(m.knowledge.find_concept("pop"), nullptr);
}

TEST(Parser, BareTokensAndStringsAreInterchangeable) {
  auto a = parse_tmk("skill s { name \"S\" root t task t { name \"n\" goal \"g\" } }");
  auto b = parse_tmk("skill \"s\" { name S root \"t\" task \"t\" { name n goal g } }");
  EXPECT_EQ(a, b);
}

TEST(Parser, DecodesEscapes) {
  auto m = parse_tmk(R"(skill s { name "a\"b\\c\nd\te\x41" root t task t { name n goal g } })");
  EXPECT_EQ(m.skill_name, "a\"b\\c\nd\teA");
}

TEST(Parser, CommentsAreIgnored) {
  auto m = parse_tmk("# header\nskill s { # trailing\n name n # more\n root t\n"
                     " task t { name n goal \"g # not a comment\" } }");
  EXPECT_EQ(m.tasks.at(0).goal, "g # not a comment");
}

struct ParseCase {
  const char* file;
  std::size_t line;
  std::size_t column;
  const char* detail;
};

class ParseFixtures : public ::testing::TestWithParam<ParseCase> {};

TEST_P(ParseFixtures, ReportsPosition) {
  const auto& c = GetParam();
  auto path = source_path(std::string("fixtures/parse/") + c.file).string();
  try {
    load_tmk_file(path);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_EQ(e.line(), c.line);
    EXPECT_EQ(e.column(), c.column);
    EXPECT_EQ(e.detail(), c.detail);
    EXPECT_NE(std::string(e.what()).find(path), std::string::npos);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Files, ParseFixtures,
    ::testing::Values(
        ParseCase{"missing-goal.tmk", 4, 3, "task 't' is missing mandatory field 'goal'"},
        ParseCase{"duplicate-field.tmk", 3, 3, "duplicate field 'name'"},
        ParseCase{"unterminated-string.tmk", 2, 8, "unterminated string"},
        ParseCase{"unknown-field.tmk", 3, 3, "unknown field 'colour' in skill block"}),
    [](const auto& info) {
      std::string name = info.param.file;
      name = name.substr(0, name.find('.'));
      for (auto& ch : name) {
        if (ch == '-') ch = '_';
      }
      return name;
    });

TEST(Parser, RejectsMalformedInput) {
  for (const char* src : {"", "skill", "skill s {", "skill s { name }", "task t { }",
                          "skill s { name n } trailing", "skill s { name \"\\q\" }",
                          "skill s { name \"\\x4\" }", "skill s { name n knowledge { } knowledge { } }",
                          "skill s { name n @ }"}) {
    EXPECT_THROW(parse_tmk(src), ParseError) << src;
  }
}

TEST(Parser, MissingFileIsIoError) {
  try {
    load_tmk_file("/nonexistent/model.tmk");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

TEST(Serializer, ShippedModelsRoundTrip) {
  for (const char* rel : {"data/models/partial-order-planning.tmk", "data/models/sorting.tmk"}) {
    auto m = parse_tmk(read_file(source_path(rel)));
    auto text = serialize_tmk(m);
    EXPECT_EQ(parse_tmk(text), m) << rel;
    EXPECT_EQ(serialize_tmk(parse_tmk(text)), text) << rel;
  }
}

TEST(Serializer, RoundTripsGeneratedModels) {
  testing::Rng rng(20240611);
  for (int i = 0; i < 100; ++i) {
    auto g = testing::random_model(rng, i);
    auto text = serialize_tmk(g.model);
    ASSERT_EQ(parse_tmk(text), g.model) << text;
  }
}

TEST(Serializer, RoundTripsControlCharacters) {
  TmkModel m;
  m.skill_id = "ctl";
  m.skill_name = std::string("bell\x07 nul-free \x1f del\x7f");
  m.root_tasks = {"t"};
  m.tasks.push_back({"t", "n", "g", {}, {}, {}, {}, {}});
  EXPECT_EQ(parse_tmk(serialize_tmk(m)), m);
}

}  // namespace
}  // namespace ivy::tmk
