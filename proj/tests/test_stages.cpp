#include <gtest/gtest.h>

#include "generators.hpp"
#include "ivy/text.hpp"
#include "support.hpp"

namespace ivy::pipeline {
namespace {

using llm::StageTag;
using Rule = llm::ScriptedMock::Rule;

struct Stage {
  llm::Gateway gateway;
  std::shared_ptr<const llm::PromptLibrary> prompts = testing::shipped_prompts();
  llm::CallLog log;
  std::vector<std::string> diagnostics;

  explicit Stage(std::vector<Rule> rules, std::string fallback = "unscripted")
      : gateway(testing::mock_rules(std::move(rules), std::move(fallback)), RetryPolicy{},
                testing::no_sleep) {}

  StageContext ctx() { return {gateway, *prompts, &log, &diagnostics}; }

  std::vector<StageTag> tags() const {
    std::vector<StageTag> out;
    for (const auto& c : log.snapshot()) out.push_back(c.tag);
    return out;
  }
};

TEST(KScore, Bounds) {
  EXPECT_EQ(KScore(1).value(), 1);
  EXPECT_EQ(KScore(4).value(), 4);
  EXPECT_THROW(KScore(0), Error);
  EXPECT_THROW(KScore(5), Error);
  EXPECT_LT(KScore(2), KScore(3));
}

TEST(ComponentNames, SkillThenTasksMethodsConceptsWithoutDuplicates) {
  auto names = component_names(testing::planning_model().model());
  ASSERT_GE(names.size(), 5u);
  EXPECT_EQ(names[0], "Partial Order Planning");
  EXPECT_EQ(names[1], "paint ladder and ceiling");
  // "partial order planning" (method and concept) folds into the skill name.
  EXPECT_EQ(std::count_if(names.begin(), names.end(),
                          [](const auto& n) { return text::iequals(n, "partial order planning"); }),
            1);
  EXPECT_NE(std::find(names.begin(), names.end(), "Robot Tasked with Painting Problem"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "backward chaining from a goal"), names.end());
}

TEST(ParseRelevance, AcceptsWellFormedReplies) {
  auto yes = parse_relevance("RELEVANT: Yes\nMATCHES: paint ladder and ceiling; partial order planning.\nRATIONALE: fits");
  ASSERT_TRUE(yes);
  EXPECT_TRUE(yes->relevant);
  EXPECT_EQ(yes->matched_component_names,
            (std::vector<std::string>{"paint ladder and ceiling", "partial order planning"}));
  EXPECT_EQ(yes->rationale, "fits");

  auto no = parse_relevance("  relevant : no.\nMATCHES: stray\nRATIONALE: off topic");
  ASSERT_TRUE(no);
  EXPECT_FALSE(no->relevant);
  EXPECT_TRUE(no->matched_component_names.empty());
}

TEST(ParseRelevance, RejectsMalformedReplies) {
  EXPECT_FALSE(parse_relevance(""));
  EXPECT_FALSE(parse_relevance("Sure, this is relevant."));
  EXPECT_FALSE(parse_relevance("RELEVANT: maybe\nMATCHES: a"));
  EXPECT_FALSE(parse_relevance("RELEVANT: yes\nMATCHES:\nRATIONALE: x"));
  EXPECT_FALSE(parse_relevance("RELEVANTS: yes\nMATCHES: a"));
}

TEST(AssessRelevance, SendsComponentListing) {
  Stage s({{StageTag::kRelevance,
            R"(Skill: Sorting\nComponent names:\n- Sorting\n- sort a list\n[\s\S]*- compare and swap\n[\s\S]*\n\nQuestion: What is a pair\?$)",
            "RELEVANT: yes\nMATCHES: Pair\nRATIONALE: ok"}});
  auto ctx = s.ctx();
  auto v = assess_relevance(ctx, "What is a pair?", testing::sorting_model());
  EXPECT_TRUE(v.relevant);
  EXPECT_EQ(v.matched_component_names, std::vector<std::string>{"Pair"});
  EXPECT_EQ(s.tags(), std::vector<StageTag>{StageTag::kRelevance});
}

TEST(AssessRelevance, RepromptsOnceThenSucceeds) {
  Stage s({{StageTag::kRelevance, "could not be parsed", "RELEVANT: no\nMATCHES:\nRATIONALE: r"},
           {StageTag::kRelevance, "", "gibberish"}});
  auto ctx = s.ctx();
  auto v = assess_relevance(ctx, "q", testing::sorting_model());
  EXPECT_FALSE(v.relevant);
  EXPECT_EQ(v.rationale, "r");
  EXPECT_EQ(s.log.size(), 2u);
  EXPECT_EQ(s.diagnostics.size(), 1u);
}

TEST(AssessRelevance, FailsClosedAfterSecondBadReply) {
  Stage s({{StageTag::kRelevance, "", "RELEVANT: yes"}});
  auto ctx = s.ctx();
  auto v = assess_relevance(ctx, "q", testing::sorting_model());
  EXPECT_EQ(v, (RelevanceVerdict{false, {}, "unparseable relevance reply"}));
  EXPECT_EQ(s.log.size(), 2u);
  EXPECT_EQ(s.diagnostics.size(), 2u);
  EXPECT_THROW(assess_relevance(ctx, "  ", testing::sorting_model()), Error);
}

TEST(ParseKScore, Forms) {
  EXPECT_EQ(parse_kscore("3")->value(), 3);
  EXPECT_EQ(parse_kscore(" 4.\n")->value(), 4);
  EXPECT_EQ(parse_kscore("01")->value(), 1);
  for (const char* bad : {"", "0", "5", "12", "three", "3 because", "-1", "2.5", "100"}) {
    EXPECT_FALSE(parse_kscore(bad)) << bad;
  }
}

TEST(AssessComplexity, ParsesOrFallsBack) {
  Stage good({{StageTag::kKScore, "", "2"}});
  auto ctx = good.ctx();
  auto c = assess_complexity(ctx, "Briefly, what is a list?");
  EXPECT_EQ(c.kscore.value(), 2);
  EXPECT_FALSE(c.fallback);

  Stage bad({{StageTag::kKScore, "", "It depends."}});
  auto bctx = bad.ctx();
  auto f = assess_complexity(bctx, "q", KScore(3));
  EXPECT_EQ(f.kscore.value(), 3);
  EXPECT_TRUE(f.fallback);
  EXPECT_EQ(bad.log.size(), 1u);
  ASSERT_EQ(bad.diagnostics.size(), 1u);
  EXPECT_NE(bad.diagnostics[0].find("fallback 3"), std::string::npos);
}

TEST(AssessComplexity, SystemPromptIsTheKScoreRubric) {
  Stage s({{StageTag::kKScore, "^Explain the plan$", "3"}});
  auto ctx = s.ctx();
  EXPECT_EQ(assess_complexity(ctx, "Explain the plan").kscore.value(), 3);
}

TEST(Retrieve, ReturnsMinOfKAndIndexSize) {
  embed::HashEmbedder e;
  testing::Rng rng(4);
  auto small = embed::build_index(testing::random_corpus(rng, 2), e);
  auto large = embed::build_index(testing::random_corpus(rng, 10), e);
  for (int k = 1; k <= 4; ++k) {
    EXPECT_EQ(retrieve("w1 w2", large, e, KScore(k)).size(), static_cast<std::size_t>(k));
    EXPECT_EQ(retrieve("w1 w2", small, e, KScore(k)).size(), std::min<std::size_t>(k, 2));
  }
  EXPECT_TRUE(retrieve("w1", embed::VectorIndex{}, e, KScore(4)).empty());
}

std::vector<docs::TmkDocument> docs_named(std::initializer_list<const char*> names) {
  std::vector<docs::TmkDocument> out;
  for (const char* n : names) {
    out.push_back({std::string("s/task/") + n, docs::ComponentKind::kTask, n,
                   std::string("body of ") + n, "s"});
  }
  return out;
}

std::vector<const docs::TmkDocument*> ptrs(const std::vector<docs::TmkDocument>& docs) {
  std::vector<const docs::TmkDocument*> out;
  for (const auto& d : docs) out.push_back(&d);
  return out;
}

TEST(Generate, OneGenerateThenOneRefinePerExtraDocument) {
  Stage s({{StageTag::kGenerate, R"(\[Document: ([^\]\n]*)\])", "Covered: {{1}}"},
           {StageTag::kRefine, R"(Current draft:\n([\s\S]*?)\n\[End draft\][\s\S]*?\[Document: ([^\]\n]*)\])",
            "{{1}}; {{2}}"}});
  auto ctx = s.ctx();
  auto docs = docs_named({"alpha", "beta", "gamma"});
  std::vector<std::string> out;
  generate_response(ctx, "q", ptrs(docs), out);
  EXPECT_EQ(out, (std::vector<std::string>{"Covered: alpha", "Covered: alpha; beta",
                                           "Covered: alpha; beta; gamma"}));
  EXPECT_EQ(s.tags(), (std::vector<StageTag>{StageTag::kGenerate, StageTag::kRefine, StageTag::kRefine}));
}

TEST(Generate, KeepsFinishedStepsWhenACallFails) {
  Stage s({{StageTag::kGenerate, "", "first"}, {StageTag::kRefine, "", " "}});
  auto ctx = s.ctx();
  auto docs = docs_named({"a", "b"});
  std::vector<std::string> out;
  EXPECT_THROW(generate_response(ctx, "q", ptrs(docs), out), Error);
  EXPECT_EQ(out, std::vector<std::string>{"first"});
  EXPECT_THROW(generate_response(ctx, "q", {}, out), Error);
}

const std::vector<std::string> kBlacklist = OptimizerOptions{}.blacklist;

TEST(Phrases, FindIsCaseInsensitiveInBlacklistOrder) {
  EXPECT_EQ(find_phrases("In the previous response, and AS MENTIONED EARLIER.", kBlacklist),
            (std::vector<std::string>{"as mentioned earlier", "in the previous response"}));
  EXPECT_TRUE(find_phrases("clean text", kBlacklist).empty());
}

TEST(Phrases, StripRemovesPhrasesAndTidies) {
  EXPECT_EQ(strip_phrases("As mentioned earlier, the robot paints the ceiling first.", kBlacklist),
            "The robot paints the ceiling first.");
  EXPECT_EQ(strip_phrases("The plan works , based on the previous information .", kBlacklist),
            "The plan works.");
  EXPECT_EQ(strip_phrases("line one\nIn the previous response we saw x.", kBlacklist),
            "line one\nWe saw x.");
  // Deleting one phrase can create another.
  EXPECT_EQ(strip_phrases("as mentioned as mentioned earlier earlier end", kBlacklist), "End");
}

TEST(Phrases, LimitLinesKeepsFirstNonBlankLines) {
  EXPECT_EQ(limit_lines("a\n\n b \nc\nd", 2), "a\nb");
  EXPECT_EQ(limit_lines("only", 2), "only");
  EXPECT_EQ(limit_lines("\n\n", 2), "");
}

Rule optimize_passthrough() {
  return {StageTag::kOptimize, R"(Draft:\n([\s\S]*?)\n\[End draft\])", "{{1}}"};
}

TEST(Optimize, PassesVerbosityAndDraft) {
  Stage s({{StageTag::kOptimize, "Length: No more than two lines[\\s\\S]*Draft:\nthe draft\n\\[End draft\\]",
            "short"}});
  auto ctx = s.ctx();
  EXPECT_EQ(optimize_response(ctx, "q", "the draft", KScore(1)), "short");
  EXPECT_TRUE(s.diagnostics.empty());
}

TEST(Optimize, RetriesOnceWhenPhrasesAppear) {
  Stage s({{StageTag::kOptimize, "still contains", "A clean rewrite."},
           {StageTag::kOptimize, "", "As mentioned earlier, a leaky rewrite."}});
  auto ctx = s.ctx();
  EXPECT_EQ(optimize_response(ctx, "q", "draft", KScore(3)), "A clean rewrite.");
  EXPECT_EQ(s.log.size(), 2u);
  ASSERT_EQ(s.diagnostics.size(), 1u);
  EXPECT_NE(s.diagnostics[0].find("as mentioned earlier"), std::string::npos);
}

TEST(Optimize, StripsMechanicallyAfterFailedRetry) {
  Stage s({optimize_passthrough()});
  auto ctx = s.ctx();
  auto out = optimize_response(ctx, "q", "Based on the previous information, the ladder stays dry.",
                               KScore(3));
  EXPECT_EQ(out, "The ladder stays dry.");
  EXPECT_EQ(s.log.size(), 2u);
  EXPECT_EQ(s.diagnostics.size(), 2u);
}

TEST(Optimize, KScoreOneIsAtMostTwoLines) {
  Stage s({optimize_passthrough()});
  auto ctx = s.ctx();
  auto out = optimize_response(ctx, "q", "one\ntwo\nthree\nfour", KScore(1));
  EXPECT_EQ(out, "one\ntwo");
  auto longer = optimize_response(ctx, "q", "one\ntwo\nthree\nfour", KScore(2));
  EXPECT_EQ(longer, "one\ntwo\nthree\nfour");
}

TEST(Optimize, EmptyAfterCleanupFallsBackToCleanedDraft) {
  Stage s({{StageTag::kOptimize, "", "As mentioned earlier."}});
  auto ctx = s.ctx();
  auto out = optimize_response(ctx, "q", "The draft text, as mentioned earlier.", KScore(3));
  EXPECT_EQ(out, "The draft text.");

  Stage hopeless({{StageTag::kOptimize, "", "As mentioned earlier."}});
  auto hctx = hopeless.ctx();
  try {
    optimize_response(hctx, "q", "as mentioned earlier", KScore(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCompletion);
  }
  EXPECT_THROW(optimize_response(hctx, "q", " ", KScore(3)), Error);
}

TEST(Optimize, GeneratedIntermediatesNeverLeakPhrases) {
  testing::Rng rng(50);
  const std::vector<std::string> variants = {"As mentioned earlier", "as MENTIONED earlier",
                                             "Based on the previous information",
                                             "in the previous response", "IN THE PREVIOUS RESPONSE"};
  for (int i = 0; i < 200; ++i) {
    std::string text;
    for (std::size_t sentence = testing::uniform(rng, 1, 6); sentence > 0; --sentence) {
      if (testing::coin(rng)) text += testing::pick(rng, variants) + ", ";
      text += testing::random_words(rng, 2, 8);
      if (testing::coin(rng, 0.3)) text += " " + testing::pick(rng, variants);
      text += testing::coin(rng, 0.3) ? ".\n" : ". ";
    }
    Stage s({optimize_passthrough()});
    auto ctx = s.ctx();
    auto k = KScore(static_cast<int>(testing::uniform(rng, 1, 4)));
    auto out = optimize_response(ctx, "q", text, k);
    EXPECT_TRUE(find_phrases(out, kBlacklist).empty()) << out;
    EXPECT_FALSE(text::trim(out).empty());
    if (k.value() == 1) EXPECT_LE(text::line_count(out), 2u);
  }
}

}  // namespace
}  // namespace ivy::pipeline
