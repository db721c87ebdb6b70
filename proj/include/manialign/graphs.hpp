#pragma once

#include "manialign/types.hpp"

#include <cstddef>
#include <vector>

namespace manialign::graphs {

inline constexpr int kNoLabel = -1;
inline constexpr int kNoObject = -1;

struct Edge {
  std::size_t i;
  std::size_t j;
  double weight;
};

/// Symmetric weighted graph without self loops. Each undirected edge is stored
/// once with i < j; (j, i) is implied.
class SparseSym {
 public:
  explicit SparseSym(std::size_t order = 0) : order_(order) {}

  /// Stores (min(i,j), max(i,j), w). Self loops and non-finite weights throw.
  void add(std::size_t i, std::size_t j, double weight);

  std::size_t order() const noexcept { return order_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  /// Weight of (i, j), or 0 when the pair is not an edge. Linear scan.
  double weight(std::size_t i, std::size_t j) const;
  /// Sorts edges by (i, j); makes equality comparisons order-independent.
  void canonicalize();

 private:
  std::size_t order_;
  std::vector<Edge> edges_;
};

/// L = D - W for the three alignment graphs, all of order n = sum n_m.
struct LaplacianTriple {
  SymMatrix geo;
  SymMatrix sim;
  SymMatrix dis;
  double mu = 1.0;
};

/// Binary k-NN graph, symmetrized by union. Distance ties go to the smaller index.
SparseSym knn_graph(const Matrix& x, std::size_t k);

struct LabelGraphs {
  SparseSym sim;
  SparseSym dis;
};

/// Same-class pairs into sim, different-class pairs into dis. Only labeled
/// samples (label != kNoLabel) get edges. With include_within_domain == false
/// pairs from the same domain are skipped. Fewer than two labeled classes
/// raise SingleClass unless require_two_classes is false.
LabelGraphs label_graphs(const std::vector<int>& labels, const std::vector<std::size_t>& domain_of,
                         bool include_within_domain = true, bool require_two_classes = true);

struct TieGraphs {
  SparseSym sim;
  SparseSym dis;
  std::vector<int> ignored_objects;  // objects present in a single domain
};

/// Graphs from semantic ties: pixels sharing an object id are similar (weight
/// 1, also within a domain); pixels of different objects are dissimilar with
/// weight dis_weight_ties. Labeled pairs add weight-1 similarity/dissimilarity
/// edges. Overlapping contributions keep the larger weight.
TieGraphs tie_graphs(const std::vector<int>& tie_object, const std::vector<std::size_t>& domain_of,
                     const std::vector<int>& labels, double dis_weight_ties = 0.5);

SymMatrix laplacian(const SparseSym& w);

/// Block-diagonal stacking of per-domain graphs, then its Laplacian.
SymMatrix assemble_block_geo(const std::vector<SparseSym>& per_domain, std::size_t total_order);

}  // namespace manialign::graphs
