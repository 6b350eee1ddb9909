#include "ivy/embed/embedding.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "ivy/text.hpp"

namespace ivy::embed {

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine of vectors with dims " +
                                                   std::to_string(a.size()) + " and " +
                                                   std::to_string(b.size()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  double denom = l2_norm(a) * l2_norm(b);
  return denom == 0.0 ? 0.0 : dot / denom;
}

std::string_view to_string(ProviderKind kind) {
  return kind == ProviderKind::kRemoteApi ? "remote-api" : "deterministic-mock";
}

ProviderKind provider_kind_from(std::string_view s) {
  if (s == "remote-api" || s == "remote") return ProviderKind::kRemoteApi;
  if (s == "deterministic-mock" || s == "mock") return ProviderKind::kDeterministicMock;
  throw Error(ErrorCode::kInvalidArgument, "unknown embedding provider '" + std::string(s) + "'");
}

HashEmbedder::HashEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dim must be positive");
}

EmbeddingVector HashEmbedder::embed(std::string_view input) const {
  if (text::trim(input).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot embed empty text");
  }
  auto tokens = text::word_tokens(input);
  if (tokens.empty()) tokens.emplace_back(input);

  EmbeddingVector v;
  v.values.assign(dim_, 0.0);
  for (const auto& token : tokens) v.values[text::fnv1a64(token) % dim_] += 1.0;
  double norm = l2_norm(v.values);
  for (double& x : v.values) x /= norm;
  return v;
}

HttpEmbedder::HttpEmbedder(RemoteEmbeddingConfig config, Sleeper sleep)
    : config_(std::move(config)), sleep_(std::move(sleep)) {
  if (config_.dim == 0) throw Error(ErrorCode::kConfig, "remote embedder needs a positive dim");
}

EmbeddingVector HttpEmbedder::embed(std::string_view input) const {
  if (text::trim(input).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot embed empty text");
  }
  nlohmann::json request{{"model", config_.model}, {"input", std::string(input)}};
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;

  return with_retries(
      config_.retry,
      [&] {
        auto response = http_post_json(config_.base_url, "/embeddings", request.dump(), headers,
                                       config_.timeout);
        raise_for_status(response, "embedding endpoint");
        EmbeddingVector v;
        try {
          auto body = nlohmann::json::parse(response.body);
          v.values = body.at("data").at(0).at("embedding").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
          throw TransportError(ErrorCode::kRejected,
                               std::string("malformed embedding response: ") + e.what(),
                               response.status);
        }
        if (v.dim() != config_.dim) {
          throw Error(ErrorCode::kDimensionMismatch,
                      "embedding endpoint returned dim " + std::to_string(v.dim()) +
                          ", configured " + std::to_string(config_.dim));
        }
        return v;
      },
      sleep_);
}

}  // namespace ivy::embed
