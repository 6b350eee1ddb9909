#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "ivy/docs/corpus.hpp"
#include "ivy/embed/embedding.hpp"

namespace ivy::embed {

struct IndexEntry {
  std::string doc_id;
  EmbeddingVector vector;

  bool operator==(const IndexEntry&) const = default;
};

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;     // cosine similarity in [-1, 1]
  std::size_t position = 0;  // corpus order

  bool operator==(const ScoredDoc&) const = default;
};

// Exact flat index. Entries keep corpus order, which is also the tie-break
// order of top_k.
class VectorIndex {
 public:
  VectorIndex() = default;
  VectorIndex(std::size_t dim, ProviderKind provider, std::vector<IndexEntry> entries);

  std::size_t dim() const noexcept { return dim_; }
  ProviderKind provider_kind() const noexcept { return provider_; }
  const std::vector<IndexEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  // min(k, size()) results, cosine descending, ties by corpus position.
  // Throws kDimensionMismatch for a query of the wrong dim, kInvalidArgument
  // for k == 0.
  std::vector<ScoredDoc> top_k(const EmbeddingVector& query, std::size_t k) const;

  // Versioned binary image of the entries, used for persistence and for
  // byte-equality checks between rebuilds.
  std::string serialize() const;
  static VectorIndex deserialize(const std::string& bytes);

  bool operator==(const VectorIndex& other) const {
    return dim_ == other.dim_ && provider_ == other.provider_ && entries_ == other.entries_;
  }

 private:
  std::size_t dim_ = 0;
  ProviderKind provider_ = ProviderKind::kDeterministicMock;
  std::vector<IndexEntry> entries_;
  std::vector<double> norms_;
};

// Embeds every document body in corpus order. An empty corpus yields an
// empty index of the provider's dim.
VectorIndex build_index(const docs::Corpus& corpus, const EmbeddingProvider& provider);

// On-disk layout of one index directory:
//   header.json  {"format": "ivy-index", "version": 1, "dim", "provider_kind",
//                 "entry_count", "skill_id", "mode"}
//   corpus.json  the rendered corpus
//   vectors.bin  VectorIndex::serialize()
void save_index(const std::filesystem::path& dir, const docs::Corpus& corpus,
                const VectorIndex& index);

struct LoadedIndex {
  docs::Corpus corpus;
  VectorIndex index;
};

LoadedIndex load_index(const std::filesystem::path& dir);

}  // namespace ivy::embed
