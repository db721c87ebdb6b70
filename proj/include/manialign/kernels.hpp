#pragma once

#include "manialign/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace manialign::kernels {

enum class KernelKind { Linear, Rbf };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& s);

/// Kernel choice. An rbf spec without a bandwidth means "half the median
/// pairwise distance", resolved against the domain's data by resolve().
struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  std::optional<double> bandwidth;

  static KernelSpec linear() { return {KernelKind::Linear, std::nullopt}; }
  static KernelSpec rbf(double sigma) { return {KernelKind::Rbf, sigma}; }
  static KernelSpec rbf_half_median() { return {KernelKind::Rbf, std::nullopt}; }

  bool resolved() const { return kind == KernelKind::Linear || bandwidth.has_value(); }
  bool operator==(const KernelSpec&) const = default;
};

inline constexpr std::size_t kMedianSubsample = 2000;

/// 0.5 * median pairwise Euclidean distance. Above kMedianSubsample rows the
/// median is taken over a seeded random subsample of that size.
double median_bandwidth(const Matrix& x, std::uint64_t seed = 0);

/// Fills in a half-median bandwidth when the kernel asks for one.
KernelSpec resolve(const KernelSpec& spec, const Matrix& x, std::uint64_t seed = 0);

/// linear: xa xb^T; rbf: exp(-||a - b||^2 / (2 sigma^2)).
Matrix gram(const Matrix& xa, const Matrix& xb, const KernelSpec& spec);

struct BlockKernel {
  std::vector<Matrix> per_domain;
  SymMatrix assembled;
  std::vector<KernelSpec> specs;
};

/// Block-diagonal kernel over domains given in global sample order.
BlockKernel assemble_block_kernel(const std::vector<Matrix>& domain_features,
                                  const std::vector<KernelSpec>& specs);

}  // namespace manialign::kernels
