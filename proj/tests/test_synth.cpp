#include "manialign/error.hpp"
#include "manialign/graphs.hpp"
#include "manialign/synth.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

using namespace manialign;
using namespace manialign::synth;

namespace {

bool bit_equal(const SynthOutput& a, const SynthOutput& b) {
  if (a.data.num_domains() != b.data.num_domains()) return false;
  for (std::size_t m = 0; m < a.data.num_domains(); ++m) {
    const auto& x = a.data.domains[m];
    const auto& y = b.data.domains[m];
    if (x.features != y.features || x.labels != y.labels || x.tie_object != y.tie_object) return false;
  }
  return a.truth == b.truth;
}

}  // namespace

TEST_CASE("every archetype: shape, determinism, validity") {
  for (auto a : {Archetype::MultiviewManifold, Archetype::ShadowAttenuation, Archetype::ColocatedTies}) {
    auto spec = default_spec(a);
    spec.seed = 5;
    const auto out = generate(spec);
    CHECK(bit_equal(out, generate(spec)));
    spec.seed = 6;
    CHECK(!bit_equal(out, generate(spec)));
    CHECK(out.data.num_domains() == spec.domains);
    CHECK(out.truth.size() == spec.domains);
    out.data.validate(2);
    for (std::size_t m = 0; m < out.data.num_domains(); ++m) {
      const auto& d = out.data.domains[m];
      CHECK(d.band_tags.size() == d.dim());
      CHECK(out.truth[m].size() == d.size());
      if (a != Archetype::ColocatedTies) CHECK(d.size() == spec.samples_per_domain);
    }
  }
}

TEST_CASE("multiview: dimensions and identity case") {
  auto spec = default_spec(Archetype::MultiviewManifold);
  const auto out = generate(spec);
  CHECK(out.data.domains[0].dim() == 2);
  CHECK(out.data.domains[1].dim() == 2);
  CHECK(out.data.domains[2].dim() == 4);
  spec.noise = 0.0;
  spec.rotation_deg = {0, 0, 0};
  spec.scale = {1, 1, 1};
  spec.lift = false;
  const auto same = generate(spec);
  CHECK(same.data.domains[0].features == same.data.domains[1].features);
  CHECK(same.data.domains[0].features == same.data.domains[2].features);
}

TEST_CASE("class counts follow the priors") {
  CHECK(class_counts(300, {1.0 / 3, 1.0 / 3, 1.0 / 3}) == std::vector<std::size_t>{100, 100, 100});
  CHECK(class_counts(10, {0.5, 0.3, 0.2}) == std::vector<std::size_t>{5, 3, 2});
  CHECK(class_counts(11, {0.5, 0.5}) == std::vector<std::size_t>{6, 5});
  auto spec = default_spec(Archetype::MultiviewManifold);
  spec.samples_per_domain = 200;
  spec.priors = {0.5, 0.25, 0.25};
  const auto out = generate(spec);
  std::map<int, std::size_t> n;
  for (int l : out.data.domains[0].labels) ++n[l];
  CHECK(n[0] == 100);
  CHECK(n[1] == 50);
  CHECK(n[2] == 50);
}

TEST_CASE("shadow: paired identity and attenuation means") {
  auto spec = default_spec(Archetype::ShadowAttenuation);
  spec.paired = true;
  spec.noise = 0.0;
  spec.attenuation = 1.0;
  spec.attenuation_spread = 0.0;
  spec.gamma_distortion = false;
  spec.depth_spread = 0.0;
  const auto same = generate(spec);
  CHECK(same.data.domains[0].features == same.data.domains[1].features);

  spec.noise = 0.05;
  spec.attenuation = 0.5;
  const auto half = generate(spec);
  const Matrix& lit = half.data.domains[0].features;
  const Matrix& shade = half.data.domains[1].features;
  const double n = static_cast<double>(lit.rows());
  const double sigma = 0.5 * spec.noise;  // additive noise of the shadowed copy
  for (Index b = 0; b < lit.cols(); ++b)
    CHECK(std::abs(shade.col(b).mean() - 0.5 * lit.col(b).mean()) <= 3.0 * sigma / std::sqrt(n));
}

TEST_CASE("shadow: unpaired default draws a different class mix") {
  const auto out = generate(default_spec(Archetype::ShadowAttenuation));
  std::map<int, std::size_t> a, b;
  for (int l : out.data.domains[0].labels) ++a[l];
  for (int l : out.data.domains[1].labels) ++b[l];
  CHECK(a != b);
  CHECK(a.size() == 8);
  CHECK(b.size() == 8);
}

TEST_CASE("within-domain 1-NN accuracy at noise 0.05") {
  for (auto a : {Archetype::MultiviewManifold, Archetype::ShadowAttenuation, Archetype::ColocatedTies}) {
    auto spec = default_spec(a);
    spec.noise = 0.05;
    const auto out = generate(spec);
    for (std::size_t m = 0; m < out.data.num_domains(); ++m) {
      const Matrix& x = out.data.domains[m].features;
      const auto& y = out.truth[m];
      // Leave-one-out 1-NN: nearest other row.
      std::size_t hits = 0;
      for (Index i = 0; i < x.rows(); ++i) {
        double bd = INFINITY;
        Index bj = 0;
        for (Index j = 0; j < x.rows(); ++j) {
          if (j == i) continue;
          const double d = (x.row(i) - x.row(j)).squaredNorm();
          if (d < bd) bd = d, bj = j;
        }
        hits += y[static_cast<std::size_t>(i)] == y[static_cast<std::size_t>(bj)];
      }
      const double acc = static_cast<double>(hits) / static_cast<double>(x.rows());
      MESSAGE(to_string(a) << " domain " << m << " 1-NN " << acc);
      CHECK(acc >= 0.95);
    }
  }
}

TEST_CASE("ties: defaults, hidden labels, class-pure objects") {
  const auto spec = default_spec(Archetype::ColocatedTies);
  const auto out = generate(spec);
  CHECK(out.tie_objects == 40);
  CHECK(out.labels_hidden == std::vector<bool>{false, true});
  for (int l : out.data.domains[1].labels) CHECK(l == kUnlabeled);
  std::set<int> objs;
  for (const auto& d : out.data.domains)
    for (int o : d.tie_object)
      if (o != kNoTie) objs.insert(o);
  CHECK(objs.size() == 40);

  auto one = spec;
  one.objects = spec.classes;
  const auto o1 = generate(one);
  std::vector<int> truth;
  for (const auto& t : o1.truth) truth.insert(truth.end(), t.begin(), t.end());
  const auto tg = graphs::tie_graphs(o1.data.tie_objects(), o1.data.domain_of(),
                                     std::vector<int>(truth.size(), graphs::kNoLabel));
  for (const auto& e : tg.sim.edges()) CHECK(truth[e.i] == truth[e.j]);
  std::set<int> classes_linked;
  for (const auto& e : tg.sim.edges()) classes_linked.insert(truth[e.i]);
  CHECK(classes_linked.size() == spec.classes);
}

TEST_CASE("bad specs") {
  auto s = default_spec(Archetype::ShadowAttenuation);
  s.attenuation = 0.0;
  CHECK_THROWS_AS(generate(s), Error);
  auto m = default_spec(Archetype::MultiviewManifold);
  m.domains = 1;
  CHECK_THROWS_AS(generate(m), Error);
  auto t = default_spec(Archetype::ColocatedTies);
  t.objects = 2;
  try {
    generate(t);
    FAIL("expected BadSpec");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadSpec);
  }
  auto p = default_spec(Archetype::MultiviewManifold);
  p.priors = {0.5, 0.2, 0.2};
  CHECK_THROWS_AS(generate(p), Error);
  CHECK(archetype_from_string("colocated_ties") == Archetype::ColocatedTies);
  CHECK_THROWS_AS(archetype_from_string("raster"), Error);
}
