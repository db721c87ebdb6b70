#include "manialign/graphs.hpp"

#include "manialign/error.hpp"
#include "manialign/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace manialign::graphs {

namespace {
constexpr const char* kModule = "graphs";
}

void SparseSym::add(std::size_t i, std::size_t j, double weight) {
  if (i == j) throw Error(ErrorKind::BadSpec, kModule, "self loops are not allowed");
  if (i >= order_ || j >= order_) {
    throw Error(ErrorKind::DimensionMismatch, kModule, "edge index out of range");
  }
  if (!std::isfinite(weight)) throw Error(ErrorKind::NonFinite, kModule, "non-finite edge weight");
  edges_.push_back({std::min(i, j), std::max(i, j), weight});
}

double SparseSym::weight(std::size_t i, std::size_t j) const {
  const std::size_t a = std::min(i, j);
  const std::size_t b = std::max(i, j);
  double w = 0.0;
  for (const auto& e : edges_)
    if (e.i == a && e.j == b) w += e.weight;
  return w;
}

void SparseSym::canonicalize() {
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& x, const Edge& y) { return x.i != y.i ? x.i < y.i : x.j < y.j; });
}

SparseSym knn_graph(const Matrix& x, std::size_t k) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n == 0) throw Error(ErrorKind::EmptyDataset, kModule, "k-NN graph of an empty dataset");
  if (k >= n) {
    throw Error(ErrorKind::KTooLarge, kModule,
                "k = " + std::to_string(k) + " needs more than " + std::to_string(n) + " samples");
  }
  const auto nn = parallel::nearest_neighbors(x, k);
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : nn[i]) pairs.emplace(std::min(i, j), std::max(i, j));
  SparseSym g(n);
  for (const auto& [i, j] : pairs) g.add(i, j, 1.0);
  return g;
}

LabelGraphs label_graphs(const std::vector<int>& labels, const std::vector<std::size_t>& domain_of,
                         bool include_within_domain, bool require_two_classes) {
  if (labels.size() != domain_of.size()) {
    throw Error(ErrorKind::LengthMismatch, kModule, "labels and domain map differ in length");
  }
  const std::size_t n = labels.size();
  std::vector<std::size_t> labeled;
  std::set<int> classes;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kNoLabel) {
      labeled.push_back(i);
      classes.insert(labels[i]);
    }
  }
  if (require_two_classes && classes.size() < 2) {
    throw Error(ErrorKind::SingleClass, kModule,
                "need at least two classes among labeled samples, found " + std::to_string(classes.size()));
  }
  LabelGraphs out{SparseSym(n), SparseSym(n)};
  for (std::size_t a = 0; a < labeled.size(); ++a) {
    for (std::size_t b = a + 1; b < labeled.size(); ++b) {
      const std::size_t i = labeled[a];
      const std::size_t j = labeled[b];
      if (!include_within_domain && domain_of[i] == domain_of[j]) continue;
      if (labels[i] == labels[j]) {
        out.sim.add(i, j, 1.0);
      } else {
        out.dis.add(i, j, 1.0);
      }
    }
  }
  return out;
}

TieGraphs tie_graphs(const std::vector<int>& tie_object, const std::vector<std::size_t>& domain_of,
                     const std::vector<int>& labels, double dis_weight_ties) {
  const std::size_t n = tie_object.size();
  if (domain_of.size() != n || labels.size() != n) {
    throw Error(ErrorKind::LengthMismatch, kModule, "tie ids, labels and domain map differ in length");
  }
  if (!(dis_weight_ties >= 0.0) || !std::isfinite(dis_weight_ties)) {
    throw Error(ErrorKind::BadConfig, kModule, "tie dissimilarity weight must be finite and >= 0");
  }

  std::map<int, std::set<std::size_t>> object_domains;
  for (std::size_t i = 0; i < n; ++i)
    if (tie_object[i] != kNoObject) object_domains[tie_object[i]].insert(domain_of[i]);

  TieGraphs out{SparseSym(n), SparseSym(n), {}};
  std::set<int> valid;
  for (const auto& [obj, doms] : object_domains) {
    if (doms.size() >= 2) {
      valid.insert(obj);
    } else {
      out.ignored_objects.push_back(obj);
    }
  }
  if (valid.empty()) throw Error(ErrorKind::NoTies, kModule, "no tie object spans two domains");

  auto object_of = [&](std::size_t i) {
    const int o = tie_object[i];
    return (o != kNoObject && valid.count(o)) ? o : kNoObject;
  };
  std::vector<std::size_t> participants;
  for (std::size_t i = 0; i < n; ++i)
    if (object_of(i) != kNoObject || labels[i] != kNoLabel) participants.push_back(i);

  for (std::size_t a = 0; a < participants.size(); ++a) {
    const std::size_t i = participants[a];
    const int oi = object_of(i);
    for (std::size_t b = a + 1; b < participants.size(); ++b) {
      const std::size_t j = participants[b];
      const int oj = object_of(j);
      double sim = 0.0;
      double dis = 0.0;
      if (oi != kNoObject && oj != kNoObject) {
        if (oi == oj) {
          sim = 1.0;
        } else {
          dis = dis_weight_ties;
        }
      }
      if (labels[i] != kNoLabel && labels[j] != kNoLabel) {
        if (labels[i] == labels[j]) {
          sim = std::max(sim, 1.0);
        } else {
          dis = std::max(dis, 1.0);
        }
      }
      if (sim > 0.0) out.sim.add(i, j, sim);
      if (dis > 0.0) out.dis.add(i, j, dis);
    }
  }
  return out;
}

SymMatrix laplacian(const SparseSym& w) {
  SymMatrix l(static_cast<Index>(w.order()));
  for (const auto& e : w.edges()) {
    const auto i = static_cast<Index>(e.i);
    const auto j = static_cast<Index>(e.j);
    l.add_symmetric(i, j, -e.weight);
    l.add_symmetric(i, i, e.weight);
    l.add_symmetric(j, j, e.weight);
  }
  return l;
}

SymMatrix assemble_block_geo(const std::vector<SparseSym>& per_domain, std::size_t total_order) {
  std::size_t sum = 0;
  for (const auto& g : per_domain) sum += g.order();
  if (sum != total_order) {
    throw Error(ErrorKind::OrderMismatch, kModule,
                "domain graph orders sum to " + std::to_string(sum) + ", expected " +
                    std::to_string(total_order));
  }
  SparseSym stacked(total_order);
  std::size_t offset = 0;
  for (const auto& g : per_domain) {
    for (const auto& e : g.edges()) stacked.add(e.i + offset, e.j + offset, e.weight);
    offset += g.order();
  }
  return laplacian(stacked);
}

}  // namespace manialign::graphs
