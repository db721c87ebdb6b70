#include "manialign/baselines.hpp"

#include "manialign/eigsolve.hpp"
#include "manialign/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace manialign::baselines {

namespace {

constexpr const char* kModule = "baselines";

double quantile_sorted(const std::vector<double>& v, double q) {
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

std::vector<double> column(const Matrix& x, Index c) {
  return {x.col(c).data(), x.col(c).data() + x.rows()};
}

Matrix centered(const Matrix& k) {
  const Vector col_mean = k.colwise().mean().transpose();
  const Vector row_mean = k.rowwise().mean();
  const double total = k.mean();
  Matrix out = k;
  out.rowwise() -= col_mean.transpose();
  out.colwise() -= row_mean;
  out.array() += total;
  return out;
}

}  // namespace

double BandTransfer::apply(double v) const {
  if (affine_fallback || source_knots.size() == 1) return reference_knots.front();
  if (v <= source_knots.front()) return reference_knots.front();
  if (v >= source_knots.back()) return reference_knots.back();
  const auto it = std::upper_bound(source_knots.begin(), source_knots.end(), v);
  const auto hi = static_cast<std::size_t>(it - source_knots.begin());
  const std::size_t lo = hi - 1;
  const double t = (v - source_knots[lo]) / (source_knots[hi] - source_knots[lo]);
  return reference_knots[lo] + t * (reference_knots[hi] - reference_knots[lo]);
}

Matrix HistogramMap::apply(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != bands.size()) {
    throw Error(ErrorKind::DimensionMismatch, kModule, "histogram map band count differs from input columns");
  }
  Matrix out(x.rows(), x.cols());
  for (Index c = 0; c < x.cols(); ++c)
    for (Index r = 0; r < x.rows(); ++r) out(r, c) = bands[static_cast<std::size_t>(c)].apply(x(r, c));
  return out;
}

BandTransfer match_band(const std::vector<double>& source, const std::vector<double>& reference, std::size_t bins) {
  if (source.empty() || reference.empty()) {
    throw Error(ErrorKind::EmptyDataset, kModule, "histogram matching needs non-empty source and reference");
  }
  if (bins < 2) throw Error(ErrorKind::BadConfig, kModule, "histogram matching needs at least 2 bins");
  std::vector<double> s = source;
  std::vector<double> r = reference;
  std::sort(s.begin(), s.end());
  std::sort(r.begin(), r.end());

  BandTransfer t;
  if (s.front() == s.back()) {
    t.affine_fallback = true;
    t.source_knots = {s.front()};
    t.reference_knots = {0.5 * (r.front() + r.back())};
    return t;
  }
  t.source_knots.reserve(bins + 1);
  t.reference_knots.reserve(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) {
    const double q = static_cast<double>(k) / static_cast<double>(bins);
    t.source_knots.push_back(quantile_sorted(s, q));
    t.reference_knots.push_back(quantile_sorted(r, q));
  }
  return t;
}

HistogramMap histogram_match(const Matrix& source, const Matrix& reference, std::size_t bins) {
  if (source.cols() != reference.cols()) {
    throw Error(ErrorKind::DimensionMismatch, kModule, "source and reference need the same bands");
  }
  HistogramMap map;
  for (Index c = 0; c < source.cols(); ++c) map.bands.push_back(match_band(column(source, c), column(reference, c), bins));
  return map;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyDataset, kModule, "KS distance of an empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    const double v = (j >= b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

Matrix PairedProjection::transform(std::size_t view, const Matrix& x) const {
  if (view > 1) throw Error(ErrorKind::UnknownDomain, kModule, "kCCA has views 0 and 1 only");
  const View& v = view == 0 ? a : b;
  Matrix k = kernels::gram(x, v.samples, v.kernel);
  const Vector row_mean = k.rowwise().mean();
  k.rowwise() -= v.column_means.transpose();
  k.colwise() -= row_mean;
  k.array() += v.total_mean;
  return k * v.coefficients;
}

PairedProjection fit_kcca(const Matrix& paired_a, const Matrix& paired_b, const kernels::KernelSpec& spec_a,
                          const kernels::KernelSpec& spec_b, double eps, std::size_t p) {
  if (paired_a.rows() != paired_b.rows()) {
    throw Error(ErrorKind::LengthMismatch, kModule, "kCCA views must have the same number of paired rows");
  }
  const Index q = paired_a.rows();
  if (q < 2 || static_cast<std::size_t>(q) < p) {
    throw Error(ErrorKind::TooFewPairs, kModule,
                std::to_string(q) + " pairs cannot support " + std::to_string(p) + " canonical directions");
  }
  if (!(eps > 0.0)) throw Error(ErrorKind::BadConfig, kModule, "kCCA regularization must be positive");

  PairedProjection out;
  out.eps = eps;
  out.p = p;
  out.a.samples = paired_a;
  out.b.samples = paired_b;
  out.a.kernel = spec_a;
  out.b.kernel = spec_b;

  const Matrix ka_raw = kernels::gram(paired_a, paired_a, spec_a);
  const Matrix kb_raw = kernels::gram(paired_b, paired_b, spec_b);
  out.a.column_means = ka_raw.colwise().mean().transpose();
  out.b.column_means = kb_raw.colwise().mean().transpose();
  out.a.total_mean = ka_raw.mean();
  out.b.total_mean = kb_raw.mean();
  const Matrix ka = SymMatrix(centered(ka_raw)).dense();
  const Matrix kb = SymMatrix(centered(kb_raw)).dense();

  const Matrix ident = Matrix::Identity(q, q);
  Matrix lhs = Matrix::Zero(2 * q, 2 * q);
  lhs.topRightCorner(q, q) = ka * kb;
  lhs.bottomLeftCorner(q, q) = kb * ka;
  Matrix rhs = Matrix::Zero(2 * q, 2 * q);
  const Matrix ra = ka + eps * ident;
  const Matrix rb = kb + eps * ident;
  rhs.topLeftCorner(q, q) = ra * ra;
  rhs.bottomRightCorner(q, q) = rb * rb;

  const auto sol = eigsolve::solve_gep_full(SymMatrix(lhs), SymMatrix(rhs));
  const Index n = sol.eigenvalues.size();
  const auto pp = static_cast<Index>(p);
  out.correlations.resize(pp);
  out.a.coefficients.resize(q, pp);
  out.b.coefficients.resize(q, pp);
  for (Index j = 0; j < pp; ++j) {
    const Index src = n - 1 - j;
    out.correlations(j) = sol.eigenvalues(src);
    out.a.coefficients.col(j) = sol.eigenvectors.col(src).head(q);
    out.b.coefficients.col(j) = sol.eigenvectors.col(src).tail(q);
  }
  return out;
}

std::size_t tie_representative_index(const Matrix& pixels) {
  if (pixels.rows() == 0) throw Error(ErrorKind::EmptyObject, kModule, "tie object has no pixels in this domain");
  const Vector mean = pixels.colwise().mean().transpose();
  std::size_t best = 0;
  double best_d = (pixels.row(0).transpose() - mean).squaredNorm();
  for (Index r = 1; r < pixels.rows(); ++r) {
    const double d = (pixels.row(r).transpose() - mean).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(r);
    }
  }
  return best;
}

Vector tie_representative(const Matrix& pixels) {
  return pixels.row(static_cast<Index>(tie_representative_index(pixels))).transpose();
}

std::vector<std::string> common_band_tags(const MultiDomainCollection& data) {
  if (data.domains.empty()) throw Error(ErrorKind::EmptyDataset, kModule, "no domains");
  for (const auto& d : data.domains) {
    if (d.band_tags.size() != d.dim()) {
      throw Error(ErrorKind::BadSpec, kModule, "domain " + std::to_string(d.domain_id) + " lacks band tags");
    }
  }
  std::vector<std::string> common;
  for (const auto& tag : data.domains.front().band_tags) {
    const bool everywhere = std::all_of(data.domains.begin(), data.domains.end(), [&](const DomainDataset& d) {
      return std::find(d.band_tags.begin(), d.band_tags.end(), tag) != d.band_tags.end();
    });
    if (everywhere && std::find(common.begin(), common.end(), tag) == common.end()) common.push_back(tag);
  }
  if (common.empty()) throw Error(ErrorKind::NoCommonBands, kModule, "domains share no band tags");
  return common;
}

MultiDomainCollection common_band_subset(const MultiDomainCollection& data) {
  const auto tags = common_band_tags(data);
  MultiDomainCollection out;
  for (const auto& d : data.domains) {
    DomainDataset r = d;
    r.features.resize(d.features.rows(), static_cast<Index>(tags.size()));
    for (std::size_t t = 0; t < tags.size(); ++t) {
      const auto col = std::find(d.band_tags.begin(), d.band_tags.end(), tags[t]) - d.band_tags.begin();
      r.features.col(static_cast<Index>(t)) = d.features.col(col);
    }
    r.band_tags = tags;
    out.domains.push_back(std::move(r));
  }
  return out;
}

}  // namespace manialign::baselines
