#include "ivy/embed/index.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ivy::embed {

static_assert(std::endian::native == std::endian::little,
              "vectors.bin is written in host order and assumes little-endian");

namespace {

constexpr char kMagic[8] = {'I', 'V', 'Y', 'I', 'D', 'X', '1', '\n'};

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw Error(ErrorCode::kParse, "truncated index image");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

VectorIndex::VectorIndex(std::size_t dim, ProviderKind provider, std::vector<IndexEntry> entries)
    : dim_(dim), provider_(provider), entries_(std::move(entries)) {
  std::set<std::string_view> ids;
  norms_.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (e.vector.dim() != dim_) {
      throw Error(ErrorCode::kDimensionMismatch, "entry '" + e.doc_id + "' has dim " +
                                                     std::to_string(e.vector.dim()) +
                                                     ", index dim " + std::to_string(dim_));
    }
    if (!ids.insert(e.doc_id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate doc id '" + e.doc_id + "' in index");
    }
    norms_.push_back(l2_norm(e.vector.values));
  }
}

std::vector<ScoredDoc> VectorIndex::top_k(const EmbeddingVector& query, std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "top_k requires k >= 1");
  if (query.dim() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "query dim " + std::to_string(query.dim()) +
                                                   " does not match index dim " +
                                                   std::to_string(dim_));
  }
  const double query_norm = l2_norm(query.values);
  std::vector<double> scores(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& v = entries_[i].vector.values;
    double dot = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) dot += query.values[d] * v[d];
    double denom = query_norm * norms_[i];
    scores[i] = denom == 0.0 ? 0.0 : dot / denom;
  }

  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });

  std::vector<ScoredDoc> out;
  out.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t i = order[r];
    out.push_back({entries_[i].doc_id, std::clamp(scores[i], -1.0, 1.0), i});
  }
  return out;
}

std::string VectorIndex::serialize() const {
  std::string out(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, dim_);
  put<std::uint8_t>(out, provider_ == ProviderKind::kRemoteApi ? 1 : 0);
  put<std::uint64_t>(out, entries_.size());
  for (const auto& e : entries_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.doc_id.size()));
    out += e.doc_id;
    for (double x : e.vector.values) put<double>(out, x);
  }
  return out;
}

VectorIndex VectorIndex::deserialize(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::kParse, "not an ivy index image");
  }
  std::size_t pos = sizeof kMagic;
  auto dim = take<std::uint64_t>(bytes, pos);
  auto provider = take<std::uint8_t>(bytes, pos) == 1 ? ProviderKind::kRemoteApi
                                                       : ProviderKind::kDeterministicMock;
  auto count = take<std::uint64_t>(bytes, pos);
  std::vector<IndexEntry> entries;
  entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto len = take<std::uint32_t>(bytes, pos);
    if (pos + len > bytes.size()) throw Error(ErrorCode::kParse, "truncated index image");
    IndexEntry e;
    e.doc_id = bytes.substr(pos, len);
    pos += len;
    e.vector.values.resize(dim);
    for (auto& x : e.vector.values) x = take<double>(bytes, pos);
    entries.push_back(std::move(e));
  }
  if (pos != bytes.size()) throw Error(ErrorCode::kParse, "trailing bytes in index image");
  return VectorIndex(dim, provider, std::move(entries));
}

VectorIndex build_index(const docs::Corpus& corpus, const EmbeddingProvider& provider) {
  std::vector<IndexEntry> entries;
  entries.reserve(corpus.size());
  for (const auto& doc : corpus.documents) {
    entries.push_back({doc.doc_id, provider.embed(doc.body)});
  }
  return VectorIndex(provider.dim(), provider.kind(), std::move(entries));
}

void save_index(const std::filesystem::path& dir, const docs::Corpus& corpus,
                const VectorIndex& index) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  nlohmann::json header{{"format", "ivy-index"},
                        {"version", 1},
                        {"dim", index.dim()},
                        {"provider_kind", std::string(to_string(index.provider_kind()))},
                        {"entry_count", index.size()},
                        {"skill_id", corpus.skill_id},
                        {"mode", std::string(docs::to_string(corpus.mode))}};
  write_file(dir / "corpus.json", corpus.to_json());
  write_file(dir / "vectors.bin", index.serialize());
  write_file(dir / "header.json", header.dump(2) + "\n");
}

LoadedIndex load_index(const std::filesystem::path& dir) {
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(read_file(dir / "header.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, "malformed index header in " + dir.string() + ": " + e.what());
  }
  if (header.value("format", "") != "ivy-index" || header.value("version", 0) != 1) {
    throw Error(ErrorCode::kParse, "unsupported index format in " + dir.string());
  }
  LoadedIndex out;
  out.corpus = docs::Corpus::from_json(read_file(dir / "corpus.json"));
  out.index = VectorIndex::deserialize(read_file(dir / "vectors.bin"));
  if (out.index.dim() != header.value("dim", std::size_t{0}) ||
      out.index.size() != header.value("entry_count", std::size_t{0}) ||
      out.index.size() != out.corpus.size()) {
    throw Error(ErrorCode::kParse, "index header does not match its contents in " + dir.string());
  }
  return out;
}

}  // namespace ivy::embed
