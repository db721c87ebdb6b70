#include "manialign/kernels.hpp"

#include "manialign/error.hpp"
#include "manialign/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace manialign::kernels {

namespace {
constexpr const char* kModule = "kernels";
}

std::string to_string(KernelKind kind) { return kind == KernelKind::Linear ? "linear" : "rbf"; }

KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "linear") return KernelKind::Linear;
  if (s == "rbf") return KernelKind::Rbf;
  throw Error(ErrorKind::BadConfig, kModule, "unknown kernel kind '" + s + "'");
}

double median_bandwidth(const Matrix& x, std::uint64_t seed) {
  const Index n = x.rows();
  if (n < 2) throw Error(ErrorKind::DegenerateData, kModule, "median bandwidth needs at least two samples");

  Matrix sample;
  if (static_cast<std::size_t>(n) > kMedianSubsample) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(kMedianSubsample);
    std::sort(idx.begin(), idx.end());
    sample.resize(static_cast<Index>(kMedianSubsample), x.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) sample.row(static_cast<Index>(r)) = x.row(idx[r]);
  } else {
    sample = x;
  }

  const Matrix d2 = parallel::squared_distances(sample, sample);
  const Index m = sample.rows();
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j) dist.push_back(std::sqrt(d2(i, j)));

  const std::size_t count = dist.size();
  const std::size_t mid = count / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double median = dist[mid];
  if (count % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (lower + median);
  }
  if (!(median > 0.0)) {
    throw Error(ErrorKind::DegenerateData, kModule, "median pairwise distance is zero (identical samples)");
  }
  return 0.5 * median;
}

KernelSpec resolve(const KernelSpec& spec, const Matrix& x, std::uint64_t seed) {
  if (spec.kind == KernelKind::Linear) return KernelSpec::linear();
  if (spec.bandwidth) {
    if (!(*spec.bandwidth > 0.0) || !std::isfinite(*spec.bandwidth)) {
      throw Error(ErrorKind::BadConfig, kModule, "rbf bandwidth must be positive");
    }
    return spec;
  }
  return KernelSpec::rbf(median_bandwidth(x, seed));
}

Matrix gram(const Matrix& xa, const Matrix& xb, const KernelSpec& spec) {
  if (xa.cols() != xb.cols()) {
    throw Error(ErrorKind::DimensionMismatch, kModule,
                "feature dimensions " + std::to_string(xa.cols()) + " and " + std::to_string(xb.cols()) +
                    " differ");
  }
  if (spec.kind == KernelKind::Linear) return parallel::linear_gram(xa, xb);
  if (!spec.resolved() || !(*spec.bandwidth > 0.0)) {
    throw Error(ErrorKind::BadConfig, kModule, "rbf kernel needs a positive resolved bandwidth");
  }
  return parallel::rbf_gram(xa, xb, *spec.bandwidth);
}

BlockKernel assemble_block_kernel(const std::vector<Matrix>& domain_features,
                                  const std::vector<KernelSpec>& specs) {
  if (domain_features.size() != specs.size()) {
    throw Error(ErrorKind::OrderMismatch, kModule,
                std::to_string(specs.size()) + " kernel specs for " + std::to_string(domain_features.size()) +
                    " domains");
  }
  BlockKernel out;
  Index n = 0;
  for (const auto& x : domain_features) n += x.rows();
  Matrix assembled = Matrix::Zero(n, n);
  Index offset = 0;
  for (std::size_t m = 0; m < specs.size(); ++m) {
    if (!specs[m].resolved()) {
      throw Error(ErrorKind::BadConfig, kModule, "kernel spec for domain " + std::to_string(m) + " is unresolved");
    }
    Matrix k = gram(domain_features[m], domain_features[m], specs[m]);
    const Index nm = k.rows();
    assembled.block(offset, offset, nm, nm) = k;
    out.per_domain.push_back(std::move(k));
    offset += nm;
  }
  out.assembled = SymMatrix(assembled);
  out.specs = specs;
  return out;
}

}  // namespace manialign::kernels
