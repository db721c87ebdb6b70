#include "manialign/sampling.hpp"

#include "manialign/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace manialign::sampling {

namespace {

constexpr const char* kModule = "sampling";

Vector mean_of(const Matrix& x, const std::vector<std::size_t>& rows) {
  Vector c = Vector::Zero(x.cols());
  for (std::size_t r : rows) c += x.row(static_cast<Index>(r)).transpose();
  if (!rows.empty()) c /= static_cast<double>(rows.size());
  return c;
}

double sqdist(const Matrix& x, std::size_t r, const Vector& c) {
  return (x.row(static_cast<Index>(r)).transpose() - c).squaredNorm();
}

struct Split {
  std::vector<std::size_t> a;
  std::vector<std::size_t> b;
};

// One 2-means run on `rows`; either child may come back empty.
Split two_means(const Matrix& x, const std::vector<std::size_t>& rows, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
  Vector c0 = x.row(static_cast<Index>(rows[pick(rng)])).transpose();

  std::vector<double> d2(rows.size());
  double total = 0.0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    d2[t] = sqdist(x, rows[t], c0);
    total += d2[t];
  }
  Vector c1;
  if (total > 0.0) {
    std::uniform_real_distribution<double> u(0.0, total);
    const double target = u(rng);
    double acc = 0.0;
    std::size_t chosen = rows.size() - 1;
    for (std::size_t t = 0; t < rows.size(); ++t) {
      acc += d2[t];
      if (acc >= target && d2[t] > 0.0) {
        chosen = t;
        break;
      }
    }
    c1 = x.row(static_cast<Index>(rows[chosen])).transpose();
  } else {
    c1 = x.row(static_cast<Index>(rows[pick(rng)])).transpose();
  }

  std::vector<int> assign(rows.size(), -1);
  Split s;
  for (int it = 0; it < kMaxIterations; ++it) {
    bool changed = false;
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const int a = sqdist(x, rows[t], c1) < sqdist(x, rows[t], c0) ? 1 : 0;
      if (a != assign[t]) {
        assign[t] = a;
        changed = true;
      }
    }
    s.a.clear();
    s.b.clear();
    for (std::size_t t = 0; t < rows.size(); ++t) (assign[t] == 0 ? s.a : s.b).push_back(rows[t]);
    if (!changed || s.a.empty() || s.b.empty()) break;
    c0 = mean_of(x, s.a);
    c1 = mean_of(x, s.b);
  }
  return s;
}

}  // namespace

std::vector<std::size_t> ClusterTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].is_leaf()) out.push_back(i);
  return out;
}

ClusterTree bisecting_kmeans(const Matrix& x, std::size_t num_clusters, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0) throw Error(ErrorKind::EmptyDataset, kModule, "cannot cluster an empty dataset");
  if (num_clusters == 0 || num_clusters > n) {
    throw Error(ErrorKind::CountTooLarge, kModule,
                "cannot form " + std::to_string(num_clusters) + " clusters from " + std::to_string(n) + " samples");
  }
  std::mt19937_64 rng(seed);
  ClusterTree tree;
  ClusterNode root;
  root.members.resize(n);
  std::iota(root.members.begin(), root.members.end(), std::size_t{0});
  root.centroid = mean_of(x, root.members);
  tree.nodes.push_back(std::move(root));

  std::size_t leaf_count = 1;
  while (leaf_count < num_clusters) {
    std::size_t target = 0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const auto& node = tree.nodes[i];
      if (node.is_leaf() && node.members.size() > best) {
        best = node.members.size();
        target = i;
      }
    }
    const std::vector<std::size_t> members = tree.nodes[target].members;

    Split s;
    for (int attempt = 0; attempt <= kMaxReseeds; ++attempt) {
      s = two_means(x, members, rng);
      if (!s.a.empty() && !s.b.empty()) break;
    }
    if (s.a.empty() || s.b.empty()) {
      // Identical members: peel off a singleton so the split still makes progress.
      s.a = {members.front()};
      s.b.assign(members.begin() + 1, members.end());
    }
    std::sort(s.a.begin(), s.a.end());
    std::sort(s.b.begin(), s.b.end());
    // Child holding the smallest index first, so node ids follow data order.
    if (s.b.front() < s.a.front()) std::swap(s.a, s.b);

    for (auto* part : {&s.a, &s.b}) {
      ClusterNode child;
      child.members = std::move(*part);
      child.centroid = mean_of(x, child.members);
      child.parent = static_cast<std::ptrdiff_t>(target);
      tree.nodes.push_back(std::move(child));
    }
    tree.nodes[target].left = static_cast<std::ptrdiff_t>(tree.nodes.size() - 2);
    tree.nodes[target].right = static_cast<std::ptrdiff_t>(tree.nodes.size() - 1);
    tree.split_order.push_back(target);
    ++leaf_count;
  }
  return tree;
}

double within_cluster_sse(const Matrix& x, const ClusterTree& tree) {
  double sse = 0.0;
  for (std::size_t leaf : tree.leaves()) {
    const auto& node = tree.nodes[leaf];
    for (std::size_t r : node.members) sse += sqdist(x, r, node.centroid);
  }
  return sse;
}

std::vector<std::size_t> select_unlabeled(const Matrix& x, std::size_t count, std::uint64_t seed,
                                          SelectionMethod method) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (count > n) {
    throw Error(ErrorKind::CountTooLarge, kModule,
                "asked for " + std::to_string(count) + " samples from a pool of " + std::to_string(n));
  }
  if (count == 0) return {};
  std::vector<std::size_t> out;
  if (method == SelectionMethod::Random) {
    out.resize(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(out.begin(), out.end(), rng);
    out.resize(count);
  } else {
    const auto tree = bisecting_kmeans(x, count, seed);
    for (std::size_t leaf : tree.leaves()) {
      const auto& node = tree.nodes[leaf];
      std::size_t best = node.members.front();
      double best_d = sqdist(x, best, node.centroid);
      for (std::size_t r : node.members) {
        const double d = sqdist(x, r, node.centroid);
        if (d < best_d) {
          best_d = d;
          best = r;
        }
      }
      out.push_back(best);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace manialign::sampling
