#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "scembed/common.hpp"
#include "scembed/scode.hpp"

namespace scembed {

struct Neighbor {
  WordId word;
  double distance2;
};

struct NeighborList {
  WordId query;
  std::vector<Neighbor> neighbors;  // distance non-decreasing, query excluded
};

// K nearest columns by squared Euclidean distance, ties by ascending id.
// On unit vectors this ranking coincides with descending cosine similarity.
template <typename Scalar>
NeighborList nearest_neighbors(const MatrixX<Scalar>& vectors, WordId query, int k) {
  if (query < 0 || query >= vectors.cols()) {
    throw ValidationError("unknown word id " + std::to_string(query));
  }
  if (k < 1) throw ValidationError("neighbor count must be >= 1");
  std::vector<std::pair<double, WordId>> scored;
  scored.reserve(static_cast<std::size_t>(vectors.cols()) - 1);
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    if (c == query) continue;
    scored.emplace_back(static_cast<double>((vectors.col(c) - vectors.col(query)).squaredNorm()),
                        static_cast<WordId>(c));
  }
  std::sort(scored.begin(), scored.end());
  if (scored.size() > static_cast<std::size_t>(k)) scored.resize(static_cast<std::size_t>(k));
  NeighborList list;
  list.query = query;
  list.neighbors.reserve(scored.size());
  for (const auto& [d2, word] : scored) list.neighbors.push_back({word, d2});
  return list;
}

// Mean squared distance over unordered within-block pairs and over
// cross-block pairs. Every column must carry a block id; singleton blocks
// leave the within mean undefined and are rejected.
template <typename Scalar>
std::pair<double, double> block_separation(const MatrixX<Scalar>& vectors,
                                           std::span<const int> blocks) {
  if (static_cast<Eigen::Index>(blocks.size()) != vectors.cols()) {
    throw ValidationError("block assignment size mismatch");
  }
  std::vector<int> sizes;
  for (int b : blocks) {
    if (b < 0) throw ValidationError("block ids must be non-negative");
    if (static_cast<std::size_t>(b) >= sizes.size()) sizes.resize(static_cast<std::size_t>(b) + 1, 0);
    ++sizes[static_cast<std::size_t>(b)];
  }
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    if (sizes[b] == 1) {
      throw ValidationError("block " + std::to_string(b) + " is a singleton; within mean undefined");
    }
  }
  double within_sum = 0.0, cross_sum = 0.0;
  std::int64_t within_n = 0, cross_n = 0;
  for (Eigen::Index i = 0; i < vectors.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < vectors.cols(); ++j) {
      const double d2 = static_cast<double>((vectors.col(i) - vectors.col(j)).squaredNorm());
      if (blocks[static_cast<std::size_t>(i)] == blocks[static_cast<std::size_t>(j)]) {
        within_sum += d2;
        ++within_n;
      } else {
        cross_sum += d2;
        ++cross_n;
      }
    }
  }
  if (within_n == 0) throw ValidationError("no within-block pairs");
  return {within_sum / static_cast<double>(within_n),
          cross_n == 0 ? 0.0 : cross_sum / static_cast<double>(cross_n)};
}

// Writes each vector multiplied by sigma; stored embeddings are untouched.
// Uniform scaling preserves nearest-neighbor order.
template <typename Scalar>
void export_scaled(std::ostream& out, std::span<const std::string> words,
                   const MatrixX<Scalar>& vectors, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("export sigma must be > 0");
  write_embeddings(out, words, vectors, sigma);
}

}  // namespace scembed
