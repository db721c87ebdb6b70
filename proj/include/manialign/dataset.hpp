#pragma once

#include "manialign/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace manialign {

inline constexpr int kUnlabeled = -1;
inline constexpr int kNoTie = -1;

/// Samples of one domain: rows of `features` are samples.
struct DomainDataset {
  Matrix features;
  std::vector<int> labels;        // kUnlabeled when absent
  std::vector<int> tie_object;    // kNoTie when absent
  std::vector<std::string> band_tags;  // optional, one per feature column
  int domain_id = 0;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
  std::size_t labeled_count() const;

  /// Builds a dataset with no labels and no ties.
  static DomainDataset unlabeled(Matrix features, int domain_id);
  /// Rows `rows` of this dataset, in the given order.
  DomainDataset subset(const std::vector<std::size_t>& rows) const;
  /// Throws DimensionMismatch / NonFinite / EmptyDataset on broken invariants.
  void validate() const;
};

/// Ordered domains. Global sample index = concatenation in domain order.
struct MultiDomainCollection {
  std::vector<DomainDataset> domains;

  std::size_t num_domains() const { return domains.size(); }
  std::size_t total_samples() const;
  std::size_t total_features() const;
  std::size_t sample_offset(std::size_t m) const;
  std::size_t feature_offset(std::size_t m) const;

  std::vector<int> labels() const;
  std::vector<int> tie_objects() const;
  std::vector<std::size_t> domain_of() const;
  /// Sorted distinct class ids among labeled samples.
  std::vector<int> classes() const;
  bool has_ties() const;

  std::vector<Matrix> feature_blocks() const;
  /// d x n block-diagonal data matrix (domain m's samples as columns).
  Matrix block_data_matrix() const;

  void validate(std::size_t min_domains = 1) const;
};

}  // namespace manialign
