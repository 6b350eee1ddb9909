#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace ivy::embed {
namespace {

double cos_of(const HashEmbedder& e, std::string_view a, std::string_view b) {
  return cosine_similarity(e.embed(a).values, e.embed(b).values);
}

TEST(HashEmbedder, MatchesPythonOracle) {
  // Frozen from tests/oracles/hash_embedder.py.
  HashEmbedder e64(64);
  auto v = e64.embed("Robot robot ladder");
  ASSERT_EQ(v.dim(), 64u);
  for (std::size_t i = 0; i < 64; ++i) {
    double expected = i == 31 ? 0.894427191 : (i == 41 ? 0.4472135955 : 0.0);
    EXPECT_NEAR(v.values[i], expected, 1e-9) << i;
  }
  auto v8 = HashEmbedder(8).embed("Robot robot ladder");
  EXPECT_NEAR(v8.values[1], 0.4472135955, 1e-9);
  EXPECT_NEAR(v8.values[7], 0.894427191, 1e-9);

  EXPECT_NEAR(cos_of(e64, "What is the goal of the painting task?",
                     "The goal of the painting task is Painted(Ladder) & Painted(Ceiling)."),
              0.734846922835, 1e-12);
  EXPECT_NEAR(cos_of(e64, "sort a list", "swap two numbers"), 0.0, 1e-12);
  EXPECT_NEAR(cos_of(e64, "partial order planning", "planning partial order"), 1.0, 1e-12);
  EXPECT_NEAR(cos_of(e64, "How do you make a quesadilla?", "resolve conflicts between subgoals"),
              0.5, 1e-12);
}

TEST(HashEmbedder, UnitNormAndDeterministic) {
  HashEmbedder e;
  testing::Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto text = testing::random_phrase(rng, 1, 20);
    auto a = e.embed(text);
    EXPECT_NEAR(l2_norm(a.values), 1.0, 1e-12);
    EXPECT_EQ(a, e.embed(text));
  }
}

TEST(HashEmbedder, PunctuationOnlyTextIsOneToken) {
  HashEmbedder e;
  auto v = e.embed("?!");
  EXPECT_NEAR(l2_norm(v.values), 1.0, 1e-12);
  EXPECT_EQ(std::count(v.values.begin(), v.values.end(), 1.0), 1);
}

TEST(HashEmbedder, RejectsBlankTextAndZeroDim) {
  HashEmbedder e;
  EXPECT_THROW(e.embed(""), Error);
  EXPECT_THROW(e.embed(" \n "), Error);
  EXPECT_THROW(HashEmbedder(0), Error);
}

TEST(Cosine, EdgeCases) {
  std::vector<double> zero(3, 0.0), a{1, 0, 0}, b{-1, 0, 0};
  EXPECT_EQ(cosine_similarity(zero, a), 0.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(a, b), -1.0);
  EXPECT_THROW(cosine_similarity(a, std::vector<double>{1, 0}), Error);
}

TEST(VectorIndex, TopKMatchesBruteForce) {
  HashEmbedder e;
  testing::Rng rng(42);
  for (int round = 0; round < 60; ++round) {
    auto corpus = testing::random_corpus(rng, testing::uniform(rng, 1, 200));
    auto index = build_index(corpus, e);
    auto raw = testing::raw_vectors(index);
    for (int q = 0; q < 5; ++q) {
      auto query = e.embed(testing::random_words(rng, 1, 5));
      for (std::size_t k = 1; k <= 4; ++k) {
        auto got = index.top_k(query, k);
        auto want = testing::brute_force_top_k(raw, query.values, k);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t r = 0; r < got.size(); ++r) {
          EXPECT_EQ(got[r].position, want[r].position);
          EXPECT_EQ(got[r].doc_id, corpus.documents[want[r].position].doc_id);
          EXPECT_EQ(got[r].score, want[r].score);
        }
      }
    }
  }
}

TEST(VectorIndex, TiesBreakByCorpusOrder) {
  HashEmbedder e;
  docs::Corpus corpus;
  corpus.skill_id = "s";
  for (int i = 0; i < 4; ++i) {
    corpus.documents.push_back({"s/task/" + std::to_string(i), docs::ComponentKind::kTask, "n",
                                i == 2 ? "other words" : "same text", "s"});
  }
  auto hits = build_index(corpus, e).top_k(e.embed("same text"), 4);
  ASSERT_EQ(hits.size(), 4u);
  EXPECT_EQ(hits[0].position, 0u);
  EXPECT_EQ(hits[1].position, 1u);
  EXPECT_EQ(hits[2].position, 3u);
  EXPECT_EQ(hits[3].position, 2u);
}

TEST(VectorIndex, KLargerThanIndexAndErrors) {
  HashEmbedder e;
  testing::Rng rng(2);
  auto index = build_index(testing::random_corpus(rng, 3), e);
  EXPECT_EQ(index.top_k(e.embed("w1"), 10).size(), 3u);
  EXPECT_THROW(index.top_k(e.embed("w1"), 0), Error);
  try {
    index.top_k(HashEmbedder(8).embed("w1"), 1);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(VectorIndex, RejectsMismatchedEntries) {
  std::vector<IndexEntry> entries{{"a", {{1.0, 0.0}}}, {"b", {{1.0}}}};
  EXPECT_THROW(VectorIndex(2, ProviderKind::kDeterministicMock, entries), Error);
  std::vector<IndexEntry> dup{{"a", {{1.0, 0.0}}}, {"a", {{0.0, 1.0}}}};
  EXPECT_THROW(VectorIndex(2, ProviderKind::kDeterministicMock, dup), Error);
}

TEST(VectorIndex, EmptyCorpusGivesEmptyIndex) {
  HashEmbedder e(16);
  docs::Corpus corpus;
  auto index = build_index(corpus, e);
  EXPECT_TRUE(index.empty());
  EXPECT_EQ(index.dim(), 16u);
  EXPECT_TRUE(index.top_k(e.embed("x"), 3).empty());
}

TEST(VectorIndex, SerializeRoundTripIsByteStable) {
  HashEmbedder e;
  auto corpus = docs::render_documents(testing::planning_model());
  auto a = build_index(corpus, e);
  auto b = build_index(corpus, e);
  EXPECT_EQ(a.serialize(), b.serialize());
  EXPECT_EQ(VectorIndex::deserialize(a.serialize()), a);
  auto bytes = a.serialize();
  EXPECT_THROW(VectorIndex::deserialize(bytes.substr(0, bytes.size() - 3)), Error);
  EXPECT_THROW(VectorIndex::deserialize("not an index"), Error);
}

TEST(VectorIndex, SaveAndLoadDirectory) {
  testing::TempDir tmp;
  HashEmbedder e;
  auto corpus = docs::render_documents(testing::sorting_model());
  auto index = build_index(corpus, e);
  save_index(tmp / "idx", corpus, index);
  EXPECT_TRUE(std::filesystem::exists(tmp / "idx/header.json"));
  EXPECT_TRUE(std::filesystem::exists(tmp / "idx/corpus.json"));
  EXPECT_TRUE(std::filesystem::exists(tmp / "idx/vectors.bin"));
  auto loaded = load_index(tmp / "idx");
  EXPECT_EQ(loaded.corpus, corpus);
  EXPECT_EQ(loaded.index, index);
  EXPECT_THROW(load_index(tmp / "missing"), Error);
}

TEST(ProviderKind, Names) {
  EXPECT_EQ(provider_kind_from("mock"), ProviderKind::kDeterministicMock);
  EXPECT_EQ(provider_kind_from(to_string(ProviderKind::kRemoteApi)), ProviderKind::kRemoteApi);
  EXPECT_THROW(provider_kind_from("faiss"), Error);
}

}  // namespace
}  // namespace ivy::embed
