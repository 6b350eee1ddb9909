#include <gtest/gtest.h>

#include <cctype>
#include <set>

#include "generators.hpp"
#include "support.hpp"

namespace ivy::docs {
namespace {

TEST(Render, PlanningCorpusLayout) {
  auto corpus = render_documents(testing::planning_model());
  EXPECT_EQ(corpus.skill_id, "partial-order-planning");
  EXPECT_EQ(corpus.mode, CorpusMode::kTmk);
  ASSERT_EQ(corpus.size(), 5u + 2u + 9u + 1u);
  EXPECT_EQ(corpus.documents[0].doc_id, "partial-order-planning/task/paint-ladder-and-ceiling");
  EXPECT_EQ(corpus.documents[5].doc_id, "partial-order-planning/method/partial-order-planning");
  EXPECT_EQ(corpus.documents[7].doc_id, "partial-order-planning/concept/robot");
  EXPECT_EQ(corpus.documents.back().doc_id, "partial-order-planning/knowledge/relations");

  const auto& root = corpus.documents[0];
  EXPECT_EQ(root.kind, ComponentKind::kTask);
  EXPECT_EQ(root.component_name, "paint ladder and ceiling");
  EXPECT_EQ(root.body.rfind("Kind: Task\nName: paint ladder and ceiling\nSkill: Partial Order Planning\n", 0), 0u);
  EXPECT_NE(root.body.find("Makes: Painted(Ladder) & Painted(Ceiling)\n"), std::string::npos);
  EXPECT_NE(root.body.find("Methods: partial order planning\n"), std::string::npos);
  EXPECT_NE(root.body.find("Role: root task of the skill\n"), std::string::npos);

  const auto* resolve = corpus.find("partial-order-planning/task/resolve-conflicts");
  ASSERT_NE(resolve, nullptr);
  EXPECT_NE(resolve->body.find("Sub-goal of: partial order planning (state s3:"), std::string::npos);

  const auto& method = corpus.documents[5];
  EXPECT_EQ(method.kind, ComponentKind::kMethod);
  EXPECT_NE(method.body.find("- s1: Build a separate plan for each goal condition (sub-goal: plan for a single goal)\n"),
            std::string::npos);
  EXPECT_NE(method.body.find("- s2 --[conflicts found]--> s3\n"), std::string::npos);

  const auto* pop = corpus.find("partial-order-planning/concept/pop");
  ASSERT_NE(pop, nullptr);
  EXPECT_EQ(pop->kind, ComponentKind::kKnowledge);
  EXPECT_NE(pop->body.find("- also-called: nonlinear planning\n"), std::string::npos);
  EXPECT_NE(pop->body.find("- partial order planning avoids goal clobbering\n"), std::string::npos);
}

TEST(Render, DocumentCountMatchesComponentCount) {
  testing::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    auto g = testing::random_model(rng, i);
    const auto& m = g.model;
    std::size_t expected = m.tasks.size() + m.methods.size() + m.knowledge.concepts.size() +
                           (m.knowledge.relations.empty() && m.knowledge.ground_truths.empty() ? 0 : 1);
    auto corpus = render_documents(tmk::ValidatedModel::from(m));
    EXPECT_EQ(corpus.size(), expected);
    std::set<std::string> ids;
    for (const auto& d : corpus.documents) {
      EXPECT_TRUE(ids.insert(d.doc_id).second) << d.doc_id;
      EXPECT_EQ(d.doc_id.rfind(m.skill_id + "/", 0), 0u);
      EXPECT_EQ(d.skill_id, m.skill_id);
    }
  }
}

TEST(Render, IsDeterministic) {
  EXPECT_EQ(render_documents(testing::sorting_model()), render_documents(testing::sorting_model()));
}

TEST(Corpus, JsonRoundTrip) {
  auto corpus = render_documents(testing::planning_model());
  EXPECT_EQ(Corpus::from_json(corpus.to_json()), corpus);
  auto chunks = chunk_text("one two three four", "s", {2, 1});
  EXPECT_EQ(Corpus::from_json(chunks.to_json()), chunks);
  EXPECT_THROW(Corpus::from_json("{\"skill_id\": 1}"), Error);
}

TEST(Corpus, ModeAndKindNames) {
  EXPECT_EQ(corpus_mode_from("tmk"), CorpusMode::kTmk);
  EXPECT_EQ(corpus_mode_from("baseline"), CorpusMode::kBaseline);
  EXPECT_THROW(corpus_mode_from("TMK"), Error);
  for (auto kind : {ComponentKind::kTask, ComponentKind::kMethod, ComponentKind::kKnowledge,
                    ComponentKind::kTextChunk}) {
    EXPECT_EQ(component_kind_from(to_string(kind)), kind);
  }
}

// Token start offsets found by scanning for a non-space after a space.
std::vector<std::size_t> token_starts(const std::string& raw) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool space = std::isspace(static_cast<unsigned char>(raw[i]));
    bool prev_space = i == 0 || std::isspace(static_cast<unsigned char>(raw[i - 1]));
    if (!space && prev_space) starts.push_back(i);
  }
  return starts;
}

std::vector<std::string> chunk_oracle(const std::string& raw, std::size_t size, std::size_t overlap) {
  auto starts = token_starts(raw);
  std::vector<std::string> out;
  if (starts.empty()) return out;
  const std::size_t n = starts.size(), stride = size - overlap;
  for (std::size_t first = 0;; first += stride) {
    std::size_t last = std::min(first + size, n);  // exclusive
    std::size_t begin = first == 0 ? 0 : starts[first];
    std::size_t end = last == n ? raw.size() : starts[last];
    out.push_back(raw.substr(begin, end - begin));
    if (last == n) break;
  }
  return out;
}

TEST(Chunk, MatchesOffsetOracle) {
  testing::Rng rng(5);
  const std::vector<std::string> gaps = {" ", "  ", "\n", "\t", " \n\n "};
  for (int round = 0; round < 300; ++round) {
    std::string raw;
    if (testing::coin(rng)) raw += testing::pick(rng, gaps);
    std::size_t words = testing::uniform(rng, 0, 60);
    for (std::size_t w = 0; w < words; ++w) {
      raw += "w" + std::to_string(testing::uniform(rng, 0, 999));
      if (w + 1 < words || testing::coin(rng)) raw += testing::pick(rng, gaps);
    }
    std::size_t size = testing::uniform(rng, 1, 12);
    std::size_t overlap = testing::uniform(rng, 0, size - 1);
    auto corpus = chunk_text(raw, "skill", {size, overlap});
    auto expected = chunk_oracle(raw, size, overlap);
    ASSERT_EQ(corpus.size(), expected.size()) << raw;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_EQ(corpus.documents[i].body, expected[i]);
      EXPECT_EQ(corpus.documents[i].kind, ComponentKind::kTextChunk);
    }
  }
}

TEST(Chunk, ChunksAreSubstringsThatCoverTheText) {
  std::string raw = testing::read_file(testing::source_path("data/texts/sorting.txt"));
  auto corpus = chunk_text(raw, "sorting");
  ASSERT_GE(corpus.size(), 4u);
  EXPECT_EQ(corpus.documents[0].doc_id, "sorting/chunk/0000");
  EXPECT_EQ(corpus.documents[0].component_name, "text chunk 0000");
  std::size_t covered_to = 0;
  for (const auto& d : corpus.documents) {
    auto at = raw.find(d.body);
    ASSERT_NE(at, std::string::npos);
    EXPECT_LE(at, covered_to);
    covered_to = at + d.body.size();
    EXPECT_LE(whitespace_tokens(d.body).size(), 300u);
  }
  EXPECT_EQ(covered_to, raw.size());
}

TEST(Chunk, EdgeCases) {
  EXPECT_TRUE(chunk_text("", "s").empty());
  EXPECT_TRUE(chunk_text(" \n\t ", "s").empty());
  EXPECT_EQ(chunk_text("one", "s").size(), 1u);
  EXPECT_THROW(chunk_text("a b", "s", {2, 2}), Error);
  EXPECT_THROW(chunk_text("a b", "s", {0, 0}), Error);
  auto c = chunk_text("a b c d e", "s", {2, 1});
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c.documents[0].body, "a b ");
  EXPECT_EQ(c.documents[3].body, "d e");
}

}  // namespace
}  // namespace ivy::docs
