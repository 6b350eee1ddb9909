#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ivy/embed/index.hpp"

namespace ivy::testing {

struct OracleHit {
  std::size_t position;
  double score;
};

// Full cosine scan, then k rounds of linear selection of the best remaining
// entry (higher score first, lower position on ties).
inline std::vector<OracleHit> brute_force_top_k(const std::vector<std::vector<double>>& entries,
                                                const std::vector<double>& query, std::size_t k) {
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  const double qn = norm(query);
  std::vector<double> scores;
  for (const auto& e : entries) {
    double dot = 0.0;
    for (std::size_t d = 0; d < query.size(); ++d) dot += query[d] * e[d];
    double denom = qn * norm(e);
    scores.push_back(denom == 0.0 ? 0.0 : dot / denom);
  }
  std::vector<bool> taken(entries.size(), false);
  std::vector<OracleHit> out;
  for (std::size_t r = 0; r < k && r < entries.size(); ++r) {
    std::size_t best = entries.size();
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (taken[i]) continue;
      if (best == entries.size() || scores[i] > scores[best]) best = i;
    }
    taken[best] = true;
    double s = scores[best];
    out.push_back({best, s > 1.0 ? 1.0 : (s < -1.0 ? -1.0 : s)});
  }
  return out;
}

inline std::vector<std::vector<double>> raw_vectors(const embed::VectorIndex& index) {
  std::vector<std::vector<double>> out;
  for (const auto& e : index.entries()) out.push_back(e.vector.values);
  return out;
}

}  // namespace ivy::testing
