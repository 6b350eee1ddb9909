#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ivy/transport.hpp"

namespace ivy::embed {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  bool operator==(const EmbeddingVector&) const = default;
};

double l2_norm(std::span<const double> v);

// dot(a, b) / (|a| |b|); 0 when either vector has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

enum class ProviderKind { kRemoteApi, kDeterministicMock };

std::string_view to_string(ProviderKind kind);
ProviderKind provider_kind_from(std::string_view s);

// Turns text into fixed-dimension vectors. Implementations must return the
// same vector for the same text within one process.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual ProviderKind kind() const = 0;
  virtual std::size_t dim() const = 0;

  // Throws Error(kInvalidArgument) on blank text.
  virtual EmbeddingVector embed(std::string_view text) const = 0;
};

// Deterministic bag-of-tokens embedder for offline runs and tests:
//
//   1. tokens = lowercased maximal runs of ASCII letters/digits; if the text
//      has none, the whole text is the single token
//   2. v[fnv1a64(token) mod dim] += 1 for every token occurrence
//   3. v = v / |v|
//
// Word order is ignored, so permutations of the same words embed equally.
class HashEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDim = 64;

  explicit HashEmbedder(std::size_t dim = kDefaultDim);

  ProviderKind kind() const override { return ProviderKind::kDeterministicMock; }
  std::size_t dim() const override { return dim_; }
  EmbeddingVector embed(std::string_view text) const override;

 private:
  std::size_t dim_;
};

struct RemoteEmbeddingConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string model;
  std::string api_key;
  std::size_t dim = 0;
  std::chrono::milliseconds timeout{30000};
  RetryPolicy retry;
};

// OpenAI-compatible POST {base_url}/embeddings.
class HttpEmbedder final : public EmbeddingProvider {
 public:
  explicit HttpEmbedder(RemoteEmbeddingConfig config, Sleeper sleep = real_sleep);

  ProviderKind kind() const override { return ProviderKind::kRemoteApi; }
  std::size_t dim() const override { return config_.dim; }
  EmbeddingVector embed(std::string_view text) const override;

 private:
  RemoteEmbeddingConfig config_;
  Sleeper sleep_;
};

}  // namespace ivy::embed
