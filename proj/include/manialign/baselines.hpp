#pragma once

#include "manialign/dataset.hpp"
#include "manialign/kernels.hpp"
#include "manialign/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace manialign::baselines {

inline constexpr std::size_t kDefaultBins = 256;

/// Monotone piecewise-linear map between matching quantile knots.
struct BandTransfer {
  std::vector<double> source_knots;     // non-decreasing
  std::vector<double> reference_knots;  // non-decreasing
  bool affine_fallback = false;

  double apply(double v) const;
};

struct HistogramMap {
  std::vector<BandTransfer> bands;

  /// Maps every column of x through its band transfer.
  Matrix apply(const Matrix& x) const;
};

/// Quantile knots at levels k/bins, k = 0..bins, on both samples. A constant
/// source band falls back to mapping onto the reference's [min, max] midpoint.
BandTransfer match_band(const std::vector<double>& source, const std::vector<double>& reference,
                        std::size_t bins = kDefaultBins);

/// Per-band matching; both matrices need the same number of columns.
HistogramMap histogram_match(const Matrix& source, const Matrix& reference, std::size_t bins = kDefaultBins);

/// sup |F_a - F_b| over the two empirical CDFs.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// Kernel CCA on row-paired views.
struct PairedProjection {
  struct View {
    Matrix samples;
    kernels::KernelSpec kernel;
    Matrix coefficients;   // q x p dual coefficients
    Vector column_means;   // training Gram column means, for centering
    double total_mean = 0.0;
  };
  View a;
  View b;
  Vector correlations;  // descending, length p
  double eps = 1e-3;
  std::size_t p = 0;

  /// Latent coordinates of new samples in view 0 (a) or 1 (b).
  Matrix transform(std::size_t view, const Matrix& x) const;
};

inline constexpr double kDefaultKccaEps = 1e-3;

/// Centered, regularized kernel CCA posed as
///   [0 KaKb; KbKa 0] v = rho [(Ka+eps I)^2 0; 0 (Kb+eps I)^2] v
/// and solved for the p largest rho.
PairedProjection fit_kcca(const Matrix& paired_a, const Matrix& paired_b, const kernels::KernelSpec& spec_a,
                          const kernels::KernelSpec& spec_b, double eps = kDefaultKccaEps, std::size_t p = 1);

/// Row of `pixels` closest to their mean (ties to the lower row).
std::size_t tie_representative_index(const Matrix& pixels);
Vector tie_representative(const Matrix& pixels);

/// Keeps features whose tags occur in every domain, ordered as in the first domain.
MultiDomainCollection common_band_subset(const MultiDomainCollection& data);
std::vector<std::string> common_band_tags(const MultiDomainCollection& data);

}  // namespace manialign::baselines
