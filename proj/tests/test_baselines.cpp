#include "manialign/baselines.hpp"
#include "manialign/error.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace manialign;
using namespace manialign::baselines;
using testutil::gaussian;

namespace {

std::vector<double> draw_normal(std::size_t n, std::uint64_t seed, double mean, double sd) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(mean, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

std::vector<double> mapped(const BandTransfer& t, const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = t.apply(v[i]);
  return out;
}

double max_knot_gap(const std::vector<double>& knots) {
  double g = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) g = std::max(g, knots[i] - knots[i - 1]);
  return g;
}

}  // namespace

TEST_CASE("histogram matching: identical samples give the identity") {
  const auto v = draw_normal(1000, 1, 0.0, 1.0);
  const auto t = match_band(v, v, 256);
  for (double x : v) CHECK(std::abs(t.apply(x) - x) <= 1e-6);
  for (double x : {-0.7, 0.0, 0.31, 1.2}) CHECK(std::abs(t.apply(x) - x) <= 1e-6);
}

TEST_CASE("histogram matching: a shift is undone within one bin") {
  const auto ref = draw_normal(2000, 2, 0.0, 1.0);
  std::vector<double> src = ref;
  for (auto& x : src) x += 10.0;
  const auto t = match_band(src, ref, 256);
  const double bin = (*std::max_element(ref.begin(), ref.end()) - *std::min_element(ref.begin(), ref.end())) / 256.0;
  for (double x : src) CHECK(std::abs(t.apply(x) - (x - 10.0)) <= bin);
}

TEST_CASE("histogram matching: lognormal onto normal meets the KS bounds") {
  std::mt19937_64 rng(31);
  std::lognormal_distribution<double> ln(0.0, 0.8);
  std::normal_distribution<double> nd(2.0, 0.5);
  std::vector<double> src(5000), ref(5000);
  for (auto& x : src) x = ln(rng);
  for (auto& x : ref) x = nd(rng);
  for (std::size_t bins : {64, 256}) {
    const auto t = match_band(src, ref, bins);
    const double ks = ks_distance(mapped(t, src), ref);
    MESSAGE("bins " << bins << " KS before " << ks_distance(src, ref) << " after " << ks);
    CHECK(ks <= 2.0 / static_cast<double>(bins));
    CHECK(ks <= 1.0 / static_cast<double>(bins) + 1.0 / 5000.0);
    CHECK(std::is_sorted(t.source_knots.begin(), t.source_knots.end()));
    CHECK(std::is_sorted(t.reference_knots.begin(), t.reference_knots.end()));
  }
}

TEST_CASE("histogram matching: monotone maps are monotone, equivariant, multi-band") {
  const auto a = draw_normal(1500, 4, 1.0, 0.3);
  const auto b = draw_normal(1500, 5, 3.0, 0.7);
  const auto t = match_band(a, b, 128);
  std::vector<double> grid;
  for (double x = -1.0; x <= 3.0; x += 0.01) grid.push_back(x);
  const auto m = mapped(t, grid);
  CHECK(std::is_sorted(m.begin(), m.end()));

  // Strictly increasing g = exp applied to both inputs.
  std::vector<double> ea(a.size()), eb(b.size());
  std::transform(a.begin(), a.end(), ea.begin(), [](double x) { return std::exp(x); });
  std::transform(b.begin(), b.end(), eb.begin(), [](double x) { return std::exp(x); });
  const auto te = match_band(ea, eb, 128);
  const double tol = max_knot_gap(t.reference_knots);
  for (double x : a) CHECK(std::abs(std::log(te.apply(std::exp(x))) - t.apply(x)) <= tol);

  Matrix src(1500, 2), reff(1500, 2);
  for (std::size_t i = 0; i < 1500; ++i) {
    src(static_cast<Index>(i), 0) = a[i];
    src(static_cast<Index>(i), 1) = -a[i];
    reff(static_cast<Index>(i), 0) = b[i];
    reff(static_cast<Index>(i), 1) = 0.5 * b[i];
  }
  const auto hm = histogram_match(src, reff, 128);
  const Matrix out = hm.apply(src);
  CHECK(hm.bands.size() == 2);
  for (Index c = 0; c < 2; ++c) {
    std::vector<double> o(out.col(c).data(), out.col(c).data() + 1500);
    std::vector<double> r(reff.col(c).data(), reff.col(c).data() + 1500);
    CHECK(ks_distance(o, r) <= 2.0 / 128.0);
  }
  CHECK_THROWS_AS(histogram_match(src, reff.leftCols(1)), Error);
}

TEST_CASE("histogram matching: constant band and errors") {
  const std::vector<double> c(50, 3.0);
  const auto ref = draw_normal(100, 6, 0.0, 1.0);
  const auto t = match_band(c, ref, 16);
  CHECK(t.affine_fallback);
  const double lo = *std::min_element(ref.begin(), ref.end());
  const double hi = *std::max_element(ref.begin(), ref.end());
  CHECK(t.apply(3.0) == doctest::Approx(0.5 * (lo + hi)));
  CHECK_THROWS_AS(match_band({}, ref), Error);
  CHECK_THROWS_AS(match_band(ref, ref, 1), Error);
}

TEST_CASE("ks distance") {
  CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_distance({0, 0}, {1, 1}) == 1.0);
  CHECK(ks_distance({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
}

TEST_CASE("kCCA: identical views correlate perfectly") {
  const Matrix a = 3.0 * gaussian(20, 3, 1);
  const auto cca = fit_kcca(a, a, kernels::KernelSpec::linear(), kernels::KernelSpec::linear(), 1e-6, 1);
  CHECK(std::abs(cca.correlations(0) - 1.0) <= 1e-6);
}

TEST_CASE("kCCA: an invertible linear relation keeps all correlations near 1") {
  const Matrix a = 3.0 * gaussian(30, 3, 2);
  Matrix r = gaussian(3, 3, 3);
  r.diagonal().array() += 3.0;
  const Matrix b = a * r;
  const auto cca = fit_kcca(a, b, kernels::KernelSpec::linear(), kernels::KernelSpec::linear(), 1e-6, 3);
  for (Index j = 0; j < 3; ++j) CHECK(cca.correlations(j) >= 1.0 - 1e-4);
  // Matching latent coordinates for paired rows.
  const Matrix za = cca.transform(0, a), zb = cca.transform(1, b);
  CHECK((za.col(0) - zb.col(0)).norm() <= 1e-3 * za.col(0).norm());
}

TEST_CASE("kCCA: independent views give small correlations") {
  const Matrix a = gaussian(40, 3, 37);
  const Matrix b = gaussian(40, 3, 3737);
  const auto cca = fit_kcca(a, b, kernels::KernelSpec::linear(), kernels::KernelSpec::linear(), 1e-3, 3);
  MESSAGE("correlations " << cca.correlations.transpose());
  CHECK(cca.correlations.mean() <= 0.5);
}

TEST_CASE("kCCA: correlations lie in [0, 1] and are descending") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Matrix a = gaussian(25, 2, 100 + s);
    const Matrix b = a.array().sin().matrix() + 0.2 * gaussian(25, 2, 200 + s);
    const auto cca = fit_kcca(a, b, kernels::KernelSpec::rbf(1.0), kernels::KernelSpec::rbf(0.8), 1e-2, 5);
    for (Index j = 0; j < 5; ++j) {
      CHECK(cca.correlations(j) >= -1e-8);
      CHECK(cca.correlations(j) <= 1.0 + 1e-8);
      if (j > 0) CHECK(cca.correlations(j) <= cca.correlations(j - 1));
    }
  }
}

TEST_CASE("kCCA: errors") {
  const Matrix a = gaussian(5, 2, 1);
  try {
    fit_kcca(a, a, kernels::KernelSpec::linear(), kernels::KernelSpec::linear(), 1e-3, 6);
    FAIL("expected TooFewPairs");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TooFewPairs);
  }
  CHECK_THROWS_AS(fit_kcca(a, a.topRows(4), kernels::KernelSpec::linear(), kernels::KernelSpec::linear()), Error);
  const auto cca = fit_kcca(a, a, kernels::KernelSpec::linear(), kernels::KernelSpec::linear(), 1e-3, 1);
  CHECK_THROWS_AS(cca.transform(2, a), Error);
}

TEST_CASE("tie representative") {
  const Matrix one = gaussian(1, 3, 1);
  CHECK(tie_representative_index(one) == 0);
  CHECK(tie_representative(one) == one.row(0).transpose());
  Matrix pair(2, 2);
  pair << 0, 0, 2, 2;
  CHECK(tie_representative_index(pair) == 0);
  const Matrix ten = gaussian(10, 4, 41);
  const Vector mean = ten.colwise().mean().transpose();
  std::size_t best = 0;
  for (Index r = 1; r < 10; ++r)
    if ((ten.row(r).transpose() - mean).norm() < (ten.row(static_cast<Index>(best)).transpose() - mean).norm())
      best = static_cast<std::size_t>(r);
  CHECK(tie_representative_index(ten) == best);
  try {
    tie_representative(Matrix(0, 3));
    FAIL("expected EmptyObject");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyObject);
  }
}

TEST_CASE("common band subset") {
  auto dom = [](std::vector<std::string> tags, int id) {
    DomainDataset d = DomainDataset::unlabeled(gaussian(4, static_cast<Index>(tags.size()), 10 + id), id);
    d.band_tags = std::move(tags);
    return d;
  };
  SUBCASE("identical tags") {
    MultiDomainCollection c{{dom({"a", "b"}, 0), dom({"a", "b"}, 1)}};
    const auto r = common_band_subset(c);
    CHECK(r.domains[0].features == c.domains[0].features);
    CHECK(r.domains[1].features == c.domains[1].features);
  }
  SUBCASE("disjoint tags") {
    MultiDomainCollection c{{dom({"a"}, 0), dom({"b"}, 1)}};
    try {
      common_band_subset(c);
      FAIL("expected NoCommonBands");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoCommonBands);
    }
  }
  SUBCASE("RGB and NIR-R-G share R and G") {
    MultiDomainCollection c{{dom({"R", "G", "B"}, 0), dom({"NIR", "R", "G"}, 1)}};
    const auto r = common_band_subset(c);
    CHECK(r.domains[0].band_tags == std::vector<std::string>{"R", "G"});
    CHECK(r.domains[1].band_tags == std::vector<std::string>{"R", "G"});
    CHECK(r.domains[0].features.col(0) == c.domains[0].features.col(0));
    CHECK(r.domains[1].features.col(0) == c.domains[1].features.col(1));
    CHECK(r.domains[1].features.col(1) == c.domains[1].features.col(2));
  }
}
