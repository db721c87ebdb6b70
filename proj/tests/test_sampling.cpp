#include "manialign/error.hpp"
#include "manialign/sampling.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace manialign;
using namespace manialign::sampling;
using testutil::gaussian;

namespace {

void check_partition(const ClusterTree& t, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (std::size_t leaf : t.leaves())
    for (std::size_t r : t.nodes[leaf].members) ++seen[r];
  for (int s : seen) CHECK(s == 1);
  for (const auto& node : t.nodes) {
    if (node.is_leaf()) continue;
    CHECK(node.right >= 0);
    const auto& a = t.nodes[static_cast<std::size_t>(node.left)].members;
    const auto& b = t.nodes[static_cast<std::size_t>(node.right)].members;
    CHECK(a.size() + b.size() == node.members.size());
  }
}

}  // namespace

TEST_CASE("one cluster holds everything") {
  const auto t = bisecting_kmeans(gaussian(25, 3, 1), 1, 0);
  REQUIRE(t.leaves().size() == 1);
  CHECK(t.nodes[0].members.size() == 25);
}

TEST_CASE("two separated blobs split exactly") {
  Matrix x = gaussian(60, 2, 21, 0.5);
  for (Index i = 30; i < 60; ++i) x.row(i).array() += 15.0;
  const auto t = bisecting_kmeans(x, 2, 21);
  const auto leaves = t.leaves();
  REQUIRE(leaves.size() == 2);
  std::vector<std::size_t> first(30), second(30);
  std::iota(first.begin(), first.end(), 0);
  std::iota(second.begin(), second.end(), 30);
  CHECK(t.nodes[leaves[0]].members == first);
  CHECK(t.nodes[leaves[1]].members == second);
}

TEST_CASE("num_clusters = n gives singletons; selection is the identity") {
  const Matrix x = gaussian(17, 2, 3);
  const auto t = bisecting_kmeans(x, 17, 3);
  CHECK(t.leaves().size() == 17);
  for (std::size_t leaf : t.leaves()) CHECK(t.nodes[leaf].members.size() == 1);
  check_partition(t, 17);
  std::vector<std::size_t> all(17);
  std::iota(all.begin(), all.end(), 0);
  CHECK(select_unlabeled(x, 17, 3) == all);
}

TEST_CASE("largest leaf is split each step and leaves partition the input") {
  const Matrix x = gaussian(200, 3, 8);
  const auto t = bisecting_kmeans(x, 12, 8);
  check_partition(t, 200);
  CHECK(t.split_order.size() == 11);
  // Replaying the splits: each chosen node was a largest leaf at the time.
  std::set<std::size_t> leaves{0};
  for (std::size_t s : t.split_order) {
    std::size_t largest = 0;
    for (std::size_t l : leaves) largest = std::max(largest, t.nodes[l].members.size());
    CHECK(t.nodes[s].members.size() == largest);
    leaves.erase(s);
    leaves.insert(static_cast<std::size_t>(t.nodes[s].left));
    leaves.insert(static_cast<std::size_t>(t.nodes[s].right));
  }
}

TEST_CASE("within-cluster SSE never increases as splits are added") {
  const Matrix x = gaussian(300, 4, 9);
  double prev = INFINITY;
  for (std::size_t k = 1; k <= 30; ++k) {
    const double sse = within_cluster_sse(x, bisecting_kmeans(x, k, 9));
    CHECK(sse <= prev + 1e-9 * prev);
    prev = sse;
  }
}

TEST_CASE("selection: subset without repetition, deterministic, medoids") {
  const Matrix x = gaussian(150, 2, 4);
  const auto a = select_unlabeled(x, 20, 5);
  CHECK(a == select_unlabeled(x, 20, 5));
  CHECK(std::is_sorted(a.begin(), a.end()));
  CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == 20);
  for (auto i : a) CHECK(i < 150);
  // Every pick is the member of its leaf nearest to the leaf centroid.
  const auto t = bisecting_kmeans(x, 20, 5);
  for (std::size_t leaf : t.leaves()) {
    const auto& node = t.nodes[leaf];
    std::size_t best = node.members.front();
    double bd = INFINITY;
    for (auto r : node.members) {
      const double d = (x.row(static_cast<Index>(r)).transpose() - node.centroid).squaredNorm();
      if (d < bd) bd = d, best = r;
    }
    CHECK(std::binary_search(a.begin(), a.end(), best));
  }
  const auto rnd = select_unlabeled(x, 20, 5, SelectionMethod::Random);
  CHECK(std::set<std::size_t>(rnd.begin(), rnd.end()).size() == 20);
  CHECK(kDefaultUnlabeledCount == 500);
}

TEST_CASE("duplicated data: one representative per duplicate pair") {
  const Matrix base = gaussian(40, 3, 6);
  Matrix x(80, 3);
  x << base, base;
  const auto sel = select_unlabeled(x, 40, 6);
  REQUIRE(sel.size() == 40);
  std::set<std::size_t> origin;
  for (auto i : sel) origin.insert(i % 40);
  CHECK(origin.size() == 40);
}

TEST_CASE("too many requested") {
  try {
    select_unlabeled(gaussian(5, 2, 1), 6, 0);
    FAIL("expected CountTooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CountTooLarge);
  }
}

TEST_CASE("identical points still reach the requested leaf count") {
  const Matrix x = Matrix::Ones(6, 2);
  const auto t = bisecting_kmeans(x, 4, 1);
  CHECK(t.leaves().size() == 4);
  check_partition(t, 6);
}
