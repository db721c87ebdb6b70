#include "manialign/error.hpp"
#include "manialign/graphs.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

using namespace manialign;
using namespace manialign::graphs;
using testutil::gaussian;

namespace {

std::set<std::pair<std::size_t, std::size_t>> edge_set(const SparseSym& g) {
  std::set<std::pair<std::size_t, std::size_t>> s;
  for (const auto& e : g.edges()) s.insert({e.i, e.j});
  return s;
}

// Literal sum over ordered pairs (i, j) of w_ij * ||F^T x_i - F^T x_j||^2 with
// x_i the columns of the block data matrix.
double literal_double_sum(const SparseSym& w, const Matrix& x, const Matrix& f) {
  const Matrix z = f.transpose() * x;  // p x n
  double s = 0.0;
  for (std::size_t i = 0; i < w.order(); ++i)
    for (std::size_t j = 0; j < w.order(); ++j) {
      const double wij = i == j ? 0.0 : w.weight(i, j);
      if (wij != 0.0) s += wij * (z.col(static_cast<Index>(i)) - z.col(static_cast<Index>(j))).squaredNorm();
    }
  return s;
}

SparseSym random_graph(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SparseSym g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (u(rng) < density) g.add(i, j, 0.1 + u(rng));
  return g;
}

}  // namespace

TEST_CASE("knn: collinear points with k = 1") {
  Matrix x(3, 1);
  x << 0.0, 1.0, 2.5;
  const auto g = knn_graph(x, 1);
  const std::set<std::pair<std::size_t, std::size_t>> expected{{0, 1}, {1, 2}};
  CHECK(edge_set(g) == expected);
  for (const auto& e : g.edges()) CHECK(e.weight == 1.0);
}

TEST_CASE("knn: k = n - 1 gives the complete graph") {
  const auto g = knn_graph(gaussian(7, 3, 1), 6);
  CHECK(g.edge_count() == 21);
}

TEST_CASE("knn: two separated blobs have no crossing edges") {
  Matrix x = gaussian(100, 2, 7, 0.5);
  for (Index i = 50; i < 100; ++i) x(i, 0) += 20.0;
  const auto g = knn_graph(x, 5);
  for (const auto& e : g.edges()) CHECK((e.i < 50) == (e.j < 50));
  // Union symmetrization: every vertex has degree at least k.
  std::vector<std::size_t> deg(100, 0);
  for (const auto& e : g.edges()) ++deg[e.i], ++deg[e.j];
  CHECK(*std::min_element(deg.begin(), deg.end()) >= 5);
}

TEST_CASE("knn: errors") {
  CHECK_THROWS_AS(knn_graph(gaussian(4, 2, 1), 4), Error);
  CHECK_THROWS_AS(knn_graph(Matrix(0, 2), 1), Error);
}

TEST_CASE("knn: distance ties go to the smaller index") {
  Matrix x(3, 1);
  x << 0.0, -1.0, 1.0;
  const auto g = knn_graph(x, 1);
  // Point 0 is equidistant from 1 and 2 and picks 1; 1 and 2 both pick 0.
  const std::set<std::pair<std::size_t, std::size_t>> expected{{0, 1}, {0, 2}};
  CHECK(edge_set(g) == expected);
}

TEST_CASE("knn: permutation invariance") {
  const Matrix x = gaussian(40, 3, 12);
  std::vector<std::size_t> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(5));
  Matrix xp(40, 3);
  for (std::size_t i = 0; i < 40; ++i) xp.row(static_cast<Index>(i)) = x.row(static_cast<Index>(perm[i]));
  const auto g = knn_graph(x, 4);
  const auto gp = knn_graph(xp, 4);
  std::set<std::pair<std::size_t, std::size_t>> mapped;
  for (const auto& e : gp.edges()) {
    const auto a = perm[e.i];
    const auto b = perm[e.j];
    mapped.insert({std::min(a, b), std::max(a, b)});
  }
  CHECK(mapped == edge_set(g));
}

TEST_CASE("label graphs: pair cases and error") {
  SUBCASE("same class") {
    const auto lg = label_graphs({1, 1}, {0, 1}, true, false);
    CHECK(lg.sim.edge_count() == 1);
    CHECK(lg.dis.edge_count() == 0);
  }
  SUBCASE("different classes") {
    const auto lg = label_graphs({1, 2}, {0, 1});
    CHECK(lg.sim.edge_count() == 0);
    CHECK(lg.dis.edge_count() == 1);
  }
  SUBCASE("unlabeled samples get no edges") {
    const auto lg = label_graphs({1, kNoLabel, 2, 1}, {0, 0, 1, 1});
    for (const auto& e : lg.sim.edges()) CHECK((e.i != 1 && e.j != 1));
    for (const auto& e : lg.dis.edges()) CHECK((e.i != 1 && e.j != 1));
  }
  SUBCASE("single class is refused") {
    try {
      label_graphs({3, 3, kNoLabel}, {0, 1, 1});
      FAIL("expected SingleClass");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingleClass);
    }
  }
}

TEST_CASE("label graphs: edge counts match pair enumeration") {
  // 3 domains x 10 labels x 3 classes, labels drawn with seed 1.
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> cls(0, 2);
  std::vector<int> labels;
  std::vector<std::size_t> dom;
  for (std::size_t m = 0; m < 3; ++m)
    for (int i = 0; i < 10; ++i) {
      labels.push_back(cls(rng));
      dom.push_back(m);
    }
  std::map<int, std::size_t> counts;
  for (int c : labels) ++counts[c];
  std::size_t sim_expected = 0;
  for (const auto& [c, l] : counts) sim_expected += l * (l - 1) / 2;
  const std::size_t total = labels.size() * (labels.size() - 1) / 2;
  const auto lg = label_graphs(labels, dom);
  CHECK(lg.sim.edge_count() == sim_expected);
  CHECK(lg.dis.edge_count() == total - sim_expected);

  // Without within-domain pairs: brute-force enumeration.
  std::size_t sim_cross = 0, dis_cross = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (dom[i] != dom[j]) (labels[i] == labels[j] ? sim_cross : dis_cross)++;
  const auto cross = label_graphs(labels, dom, false);
  CHECK(cross.sim.edge_count() == sim_cross);
  CHECK(cross.dis.edge_count() == dis_cross);
}

TEST_CASE("tie graphs") {
  SUBCASE("one object split over two domains") {
    const auto tg = tie_graphs({0, 0}, {0, 1}, {kNoLabel, kNoLabel});
    REQUIRE(tg.sim.edge_count() == 1);
    CHECK(tg.sim.edges()[0].weight == 1.0);
    CHECK(tg.dis.edge_count() == 0);
  }
  SUBCASE("two objects: cross-object pairs weighted 0.5") {
    const std::vector<int> obj{0, 0, 1, 1};
    const auto tg = tie_graphs(obj, {0, 1, 0, 1}, std::vector<int>(4, kNoLabel), 0.5);
    CHECK(tg.dis.edge_count() == 4);
    for (const auto& e : tg.dis.edges()) {
      CHECK(obj[e.i] != obj[e.j]);
      CHECK(e.weight == 0.5);
    }
  }
  SUBCASE("labeled source pairs add unit weights") {
    // Objects 0 and 1 with labeled source pixels of different classes.
    const auto tg = tie_graphs({0, 1, 0, 1}, {0, 0, 1, 1}, {5, 6, kNoLabel, kNoLabel}, 0.5);
    CHECK(tg.dis.weight(0, 1) == 1.0);  // labeled pair keeps the larger weight
    CHECK(tg.dis.weight(2, 3) == 0.5);
  }
  SUBCASE("an object seen in one domain only is ignored") {
    const auto tg = tie_graphs({0, 0, 7, 7}, {0, 1, 0, 0}, std::vector<int>(4, kNoLabel));
    REQUIRE(tg.ignored_objects.size() == 1);
    CHECK(tg.ignored_objects[0] == 7);
    CHECK(tg.sim.edge_count() == 1);
    CHECK(tg.dis.edge_count() == 0);
  }
  SUBCASE("no usable ties") {
    try {
      tie_graphs({0, 0, kNoObject}, {0, 0, 1}, std::vector<int>(3, kNoLabel));
      FAIL("expected NoTies");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoTies);
    }
  }
  SUBCASE("40 objects: similarity edges per object size") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> size(2, 9);
    std::vector<int> obj;
    std::vector<std::size_t> dom;
    std::size_t expected = 0;
    for (int o = 0; o < 40; ++o) {
      const int s = size(rng);
      expected += static_cast<std::size_t>(s * (s - 1) / 2);
      for (int p = 0; p < s; ++p) {
        obj.push_back(o);
        dom.push_back(p % 2);  // every object spans both domains
      }
    }
    const auto tg = tie_graphs(obj, dom, std::vector<int>(obj.size(), kNoLabel));
    CHECK(tg.sim.edge_count() == expected);
    const std::size_t n = obj.size();
    CHECK(tg.dis.edge_count() == n * (n - 1) / 2 - expected);
  }
}

TEST_CASE("laplacian: small cases and row sums") {
  SparseSym one(2);
  one.add(0, 1, 1.0);
  const Matrix l = laplacian(one).dense();
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK(l == expected);
  CHECK(laplacian(SparseSym(5)).dense().isZero(0.0));

  const auto g = random_graph(20, 0.3, 8);
  const Matrix lg = laplacian(g).dense();
  CHECK(lg.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("laplacian: quadratic form equals weighted edge sum") {
  const auto g = random_graph(12, 0.4, 21);
  const Matrix l = laplacian(g).dense();
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Vector x = gaussian(12, 1, 900 + s).col(0);
    double ref = 0.0;
    for (const auto& e : g.edges())
      ref += e.weight * std::pow(x(static_cast<Index>(e.i)) - x(static_cast<Index>(e.j)), 2);
    CHECK(x.dot(l * x) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("laplacian: PSD on random instances up to order 64") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const std::size_t n = 8 + 8 * s;
    CHECK(testutil::min_eigenvalue(laplacian(random_graph(n, 0.2, 40 + s)).dense()) >= -1e-9);
  }
}

TEST_CASE("block geo assembly") {
  SUBCASE("two single-sample domains") {
    const auto l = assemble_block_geo({SparseSym(1), SparseSym(1)}, 2);
    CHECK(l.dense().isZero(0.0));
  }
  SUBCASE("orders (3, 2): off-diagonal blocks zero, spectrum is the union") {
    SparseSym a(3), b(2);
    a.add(0, 1, 1.0);
    a.add(1, 2, 1.0);
    b.add(0, 1, 1.0);
    const Matrix l = assemble_block_geo({a, b}, 5).dense();
    CHECK(l.block(0, 3, 3, 2).isZero(0.0));
    CHECK(l.block(3, 0, 2, 3).isZero(0.0));
    Eigen::SelfAdjointEigenSolver<Matrix> full(l), ea(laplacian(a).dense()), eb(laplacian(b).dense());
    std::vector<double> uni;
    for (Index i = 0; i < 3; ++i) uni.push_back(ea.eigenvalues()(i));
    for (Index i = 0; i < 2; ++i) uni.push_back(eb.eigenvalues()(i));
    std::sort(uni.begin(), uni.end());
    for (Index i = 0; i < 5; ++i) CHECK(std::abs(full.eigenvalues()(i) - uni[static_cast<std::size_t>(i)]) < 1e-12);
  }
  SUBCASE("order mismatch") {
    try {
      assemble_block_geo({SparseSym(3)}, 4);
      FAIL("expected OrderMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::OrderMismatch);
    }
  }
}

TEST_CASE("trace forms equal the literal double sums") {
  // Two domains with d = (3, 2), n = (8, 6). The double sum over ordered
  // pairs counts each edge twice, so it equals 2 tr(F^T X L X^T F).
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Matrix x1 = gaussian(8, 3, 1000 + s);
    const Matrix x2 = gaussian(6, 2, 2000 + s);
    Matrix x = Matrix::Zero(5, 14);
    x.block(0, 0, 3, 8) = x1.transpose();
    x.block(3, 8, 2, 6) = x2.transpose();
    const Matrix f = gaussian(5, 3, 3000 + s);
    std::vector<int> labels(14);
    std::vector<std::size_t> dom(14);
    for (std::size_t i = 0; i < 14; ++i) {
      labels[i] = (i % 4 == 3) ? kNoLabel : static_cast<int>(i % 3);
      dom[i] = i < 8 ? 0 : 1;
    }
    const auto g1 = knn_graph(x1, 3);
    const auto g2 = knn_graph(x2, 3);
    const auto geo = assemble_block_geo({g1, g2}, 14);
    SparseSym wg(14);
    for (const auto& e : g1.edges()) wg.add(e.i, e.j, e.weight);
    for (const auto& e : g2.edges()) wg.add(e.i + 8, e.j + 8, e.weight);
    const auto lg = label_graphs(labels, dom);
    const std::pair<const SparseSym*, SymMatrix> terms[] = {
        {&wg, geo}, {&lg.sim, laplacian(lg.sim)}, {&lg.dis, laplacian(lg.dis)}};
    for (const auto& [w, l] : terms) {
      const double tr = (f.transpose() * x * l.dense() * x.transpose() * f).trace();
      const double lit = literal_double_sum(*w, x, f);
      CHECK(std::abs(lit - 2.0 * tr) <= 1e-8 * std::max(1.0, std::abs(lit)));
    }
  }
}
