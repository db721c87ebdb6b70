#pragma once

#include "manialign/types.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace manialign::sampling {

struct ClusterNode {
  std::vector<std::size_t> members;  // sorted row indices
  Vector centroid;
  std::ptrdiff_t parent = -1;
  std::ptrdiff_t left = -1;
  std::ptrdiff_t right = -1;
  bool is_leaf() const { return left < 0; }
};

struct ClusterTree {
  std::vector<ClusterNode> nodes;  // node 0 is the root
  std::vector<std::size_t> split_order;  // node ids in the order they were split

  /// Leaf node ids in increasing node id.
  std::vector<std::size_t> leaves() const;
};

inline constexpr int kMaxIterations = 50;
inline constexpr int kMaxReseeds = 5;

/// Repeatedly splits the leaf with the most members (ties: lower node id) by
/// 2-means with k-means++ seeding until num_clusters leaves exist.
ClusterTree bisecting_kmeans(const Matrix& x, std::size_t num_clusters, std::uint64_t seed);

/// Sum over leaves of squared distances of members to their centroid.
double within_cluster_sse(const Matrix& x, const ClusterTree& tree);

enum class SelectionMethod { BisectingKMeans, Random };

inline constexpr std::size_t kDefaultUnlabeledCount = 500;

/// Picks `count` representative rows of x: the medoid (member nearest the
/// centroid, ties to the lower index) of each bisecting k-means leaf, or a
/// seeded uniform draw. Returned indices are sorted ascending.
std::vector<std::size_t> select_unlabeled(const Matrix& x, std::size_t count, std::uint64_t seed,
                                          SelectionMethod method = SelectionMethod::BisectingKMeans);

}  // namespace manialign::sampling
