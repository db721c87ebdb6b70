#include "manialign/synth.hpp"

#include "manialign/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

namespace manialign::synth {

namespace {

constexpr const char* kModule = "synth";

using Rng = std::mt19937_64;

void bad(const std::string& msg) { throw Error(ErrorKind::BadSpec, kModule, msg); }

std::vector<double> uniform_priors(std::size_t c) { return std::vector<double>(c, 1.0 / static_cast<double>(c)); }

std::vector<double> skewed_priors(std::size_t c) {
  // Geometric decay with ratio 0.75, normalized.
  std::vector<double> p(c);
  double w = 1.0;
  for (auto& v : p) {
    v = w;
    w *= 0.75;
  }
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= s;
  return p;
}

void check_priors(const std::vector<double>& p, std::size_t classes, const char* what) {
  if (p.empty()) return;
  if (p.size() != classes) bad(std::string(what) + " must have one entry per class");
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) bad(std::string(what) + " must be non-negative");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) bad(std::string(what) + " must sum to 1");
}

// Class ids laid out in blocks of class_counts(), then shuffled.
std::vector<int> draw_labels(std::size_t n, const std::vector<double>& priors, Rng& rng) {
  const auto counts = class_counts(n, priors);
  std::vector<int> y;
  y.reserve(n);
  for (std::size_t c = 0; c < counts.size(); ++c) y.insert(y.end(), counts[c], static_cast<int>(c));
  std::shuffle(y.begin(), y.end(), rng);
  return y;
}

std::vector<std::string> tags(std::initializer_list<const char*> names) { return {names.begin(), names.end()}; }

std::vector<std::string> numbered_tags(std::size_t d) {
  std::vector<std::string> t;
  for (std::size_t b = 0; b < d; ++b) t.push_back("b" + std::to_string(b + 1));
  return t;
}

// Point on the arc of class c at parameter s in [0, 1]. Even classes are
// upper half circles, odd classes lower ones shifted to interleave.
void arc_point(int c, double s, double& x, double& y) {
  const double t = std::numbers::pi * s;
  if (c % 2 == 0) {
    x = 1.2 * static_cast<double>(c) + std::cos(t);
    y = std::sin(t);
  } else {
    x = 1.2 * static_cast<double>(c - 1) + 1.0 - std::cos(t);
    y = 0.5 - std::sin(t);
  }
}

double default_rotation(std::size_t m) {
  if (m == 0) return 0.0;
  if (m == 1) return 60.0;
  if (m == 2) return -40.0;
  return 25.0 * static_cast<double>(m);
}

double default_scale(std::size_t m) {
  if (m == 0) return 1.0;
  return m % 2 == 1 ? 1.5 : 1.0;
}

}  // namespace

std::string to_string(Archetype a) {
  switch (a) {
    case Archetype::MultiviewManifold: return "multiview";
    case Archetype::ShadowAttenuation: return "shadow";
    case Archetype::ColocatedTies: return "ties";
  }
  return "multiview";
}

Archetype archetype_from_string(const std::string& s) {
  if (s == "multiview" || s == "multiview_manifold") return Archetype::MultiviewManifold;
  if (s == "shadow" || s == "shadow_attenuation") return Archetype::ShadowAttenuation;
  if (s == "ties" || s == "colocated_ties") return Archetype::ColocatedTies;
  throw Error(ErrorKind::BadConfig, kModule, "unknown archetype '" + s + "'");
}

std::vector<std::size_t> class_counts(std::size_t n, const std::vector<double>& priors) {
  std::vector<std::size_t> counts(priors.size());
  std::size_t used = 0;
  for (std::size_t c = 0; c < priors.size(); ++c) {
    counts[c] = static_cast<std::size_t>(std::floor(static_cast<double>(n) * priors[c] + 1e-9));
    used += counts[c];
  }
  for (std::size_t c = 0; used < n; c = (c + 1) % counts.size(), ++used) ++counts[c];
  return counts;
}

void SynthSpec::validate() const {
  if (classes < 2) bad("at least 2 classes are needed");
  if (samples_per_domain < classes) bad("samples_per_domain must be at least the class count");
  if (!(noise >= 0.0) || !std::isfinite(noise)) bad("noise must be a finite non-negative number");
  check_priors(priors, classes, "priors");
  switch (archetype) {
    case Archetype::MultiviewManifold:
      if (domains < 2) bad("multiview needs at least 2 domains");
      if (!rotation_deg.empty() && rotation_deg.size() != domains) bad("rotation_deg needs one entry per domain");
      if (!scale.empty() && scale.size() != domains) bad("scale needs one entry per domain");
      for (double s : scale)
        if (!(s > 0.0)) bad("scales must be positive");
      break;
    case Archetype::ShadowAttenuation:
      if (bands < 1) bad("shadow needs at least one band");
      if (!(attenuation > 0.0 && attenuation <= 1.0)) bad("attenuation must lie in (0, 1]");
      if (!(attenuation_spread >= 0.0 && attenuation_spread < 1.0)) bad("attenuation_spread must lie in [0, 1)");
      if (gamma_distortion && !(gamma > 0.0)) bad("gamma must be positive");
      if (!(depth_spread >= 0.0 && depth_spread < 1.0)) bad("depth_spread must lie in [0, 1)");
      if (!(shadow_noise_ratio >= 0.0) || !std::isfinite(shadow_noise_ratio)) bad("shadow_noise_ratio must be >= 0");
      check_priors(shadow_priors, classes, "shadow_priors");
      break;
    case Archetype::ColocatedTies:
      if (objects < classes) bad("need at least one tie object per class");
      if (object_min_pixels < 1 || object_max_pixels < object_min_pixels) bad("invalid tie object pixel range");
      break;
  }
}

SynthSpec default_spec(Archetype a) {
  SynthSpec s;
  s.archetype = a;
  switch (a) {
    case Archetype::MultiviewManifold:
      s.classes = 3;
      s.domains = 3;
      s.samples_per_domain = 450;
      s.noise = 0.05;
      break;
    case Archetype::ShadowAttenuation:
      s.classes = 8;
      s.domains = 2;
      s.samples_per_domain = 1400;
      s.noise = 0.03;
      s.bands = 3;
      s.gamma = 2.5;
      s.depth_spread = 0.5;
      break;
    case Archetype::ColocatedTies:
      s.classes = 5;
      s.domains = 2;
      s.samples_per_domain = 500;
      s.noise = 0.06;
      break;
  }
  return s;
}

SynthOutput gen_multiview(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const auto priors = spec.priors.empty() ? uniform_priors(spec.classes) : spec.priors;
  const std::size_t n = spec.samples_per_domain;
  const std::vector<int> y = draw_labels(n, priors, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix base(static_cast<Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    double bx = 0.0;
    double by = 0.0;
    arc_point(y[i], unit(rng), bx, by);
    base(static_cast<Index>(i), 0) = bx;
    base(static_cast<Index>(i), 1) = by;
  }

  SynthOutput out;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t m = 0; m < spec.domains; ++m) {
    const double deg = spec.rotation_deg.empty() ? default_rotation(m) : spec.rotation_deg[m];
    const double sc = spec.scale.empty() ? default_scale(m) : spec.scale[m];
    const double th = deg * std::numbers::pi / 180.0;
    const bool lifted = spec.lift && m >= 2 && m % 2 == 0;
    Matrix f(static_cast<Index>(n), lifted ? 4 : 2);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Index>(i);
      const double px = base(r, 0) + spec.noise * gauss(rng);
      const double py = base(r, 1) + spec.noise * gauss(rng);
      const double u = sc * (std::cos(th) * px - std::sin(th) * py);
      const double v = sc * (std::sin(th) * px + std::cos(th) * py);
      f(r, 0) = u;
      f(r, 1) = v;
      if (lifted) {
        f(r, 2) = 0.3 * u * u;
        f(r, 3) = std::sin(2.0 * v);
      }
    }
    DomainDataset d = DomainDataset::unlabeled(std::move(f), static_cast<int>(m));
    d.labels = y;
    d.band_tags = numbered_tags(d.dim());
    out.data.domains.push_back(std::move(d));
    out.truth.push_back(y);
    out.labels_hidden.push_back(false);
  }
  return out;
}

SynthOutput gen_shadow(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t c = spec.classes;
  const std::size_t d = spec.bands;
  const std::size_t n = spec.samples_per_domain;
  const auto priors = spec.priors.empty() ? uniform_priors(c) : spec.priors;
  const auto shadow_priors = spec.shadow_priors.empty() ? skewed_priors(c) : spec.shadow_priors;

  // Class means lie on a smooth curve through the unit cube.
  Matrix means(static_cast<Index>(c), static_cast<Index>(d));
  for (std::size_t k = 0; k < c; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(c - 1);
    for (std::size_t b = 0; b < d; ++b) {
      const double phase = 1.3 * static_cast<double>(b);
      means(static_cast<Index>(k), static_cast<Index>(b)) =
          0.5 + 0.35 * std::sin(std::numbers::pi * t * (1.0 + 0.5 * static_cast<double>(b)) + phase);
    }
  }
  std::vector<double> factor(d);
  for (std::size_t b = 0; b < d; ++b) {
    const double pos = d > 1 ? static_cast<double>(b) / static_cast<double>(d - 1) : 0.5;
    factor[b] = std::min(1.0, spec.attenuation * (1.0 + spec.attenuation_spread * (2.0 * pos - 1.0)));
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&](const std::vector<int>& y) {
    Matrix x(static_cast<Index>(y.size()), static_cast<Index>(d));
    for (std::size_t i = 0; i < y.size(); ++i)
      for (std::size_t b = 0; b < d; ++b)
        x(static_cast<Index>(i), static_cast<Index>(b)) =
            means(y[i], static_cast<Index>(b)) + spec.noise * gauss(rng);
    return x;
  };

  const std::vector<int> y1 = draw_labels(n, priors, rng);
  const Matrix lit = draw(y1);
  const std::vector<int> y2 = spec.paired ? y1 : draw_labels(n, shadow_priors, rng);
  const Matrix lit2 = spec.paired ? lit : draw(y2);
  std::uniform_real_distribution<double> depth(1.0 - spec.depth_spread, 1.0);
  Matrix shade(lit2.rows(), lit2.cols());
  for (Index i = 0; i < lit2.rows(); ++i) {
    const double s = spec.depth_spread > 0.0 ? depth(rng) : 1.0;
    for (Index b = 0; b < lit2.cols(); ++b) {
      double v = lit2(i, b);
      if (spec.gamma_distortion) v = std::pow(std::max(v, 0.0), spec.gamma);
      v *= s * factor[static_cast<std::size_t>(b)];
      shade(i, b) = v + spec.shadow_noise_ratio * spec.noise * gauss(rng);
    }
  }

  SynthOutput out;
  DomainDataset a = DomainDataset::unlabeled(lit, 0);
  a.labels = y1;
  a.band_tags = numbered_tags(d);
  DomainDataset s = DomainDataset::unlabeled(std::move(shade), 1);
  s.labels = y2;
  s.band_tags = numbered_tags(d);
  out.data.domains = {std::move(a), std::move(s)};
  out.truth = {y1, y2};
  out.labels_hidden = {false, false};
  return out;
}

SynthOutput gen_ties(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t c = spec.classes;
  const std::size_t n = spec.samples_per_domain;
  const auto priors = spec.priors.empty() ? uniform_priors(c) : spec.priors;

  // Reflectance in four wavelengths (B, G, R, NIR). Class means are drawn with
  // rejection so that they stay apart in both sensors' band subsets.
  std::uniform_real_distribution<double> unit(0.05, 0.75);
  const double min_sep = 0.18;
  Matrix means(static_cast<Index>(c), 4);
  for (std::size_t k = 0; k < c; ++k) {
    for (int attempt = 0;; ++attempt) {
      for (Index w = 0; w < 4; ++w) means(static_cast<Index>(k), w) = unit(rng);
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        const Vector diff = (means.row(static_cast<Index>(k)) - means.row(static_cast<Index>(j))).transpose();
        const double rgb = diff.head(3).norm();
        const double nrg = Vector(diff.tail(3)).norm();
        ok = rgb >= min_sep && nrg >= min_sep;
      }
      if (ok || attempt > 10000) break;
    }
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double pixel_sd = 0.5 * spec.noise;
  auto source_obs = [](const Vector& r) {
    Vector o(3);
    o << r(2), r(1), r(0);  // R, G, B
    return o;
  };
  auto target_obs = [](const Vector& r) {
    // Different radiometry: saturating gain on NIR, gamma on visible bands.
    Vector o(3);
    o << 0.9 * std::tanh(1.6 * std::max(r(3), 0.0)), std::pow(std::max(r(2), 0.0), 0.6),
        0.2 + 0.8 * std::pow(std::max(r(1), 0.0), 1.5);
    return o;
  };
  auto jitter = [&](const Vector& mean, double sd) {
    Vector r = mean;
    for (Index w = 0; w < r.size(); ++w) r(w) += sd * gauss(rng);
    return r;
  };

  struct Rows {
    std::vector<Vector> x;
    std::vector<int> y;
    std::vector<int> tie;
  };
  Rows src;
  Rows tgt;
  const double free_sd = std::sqrt(spec.noise * spec.noise + pixel_sd * pixel_sd);
  for (int k : draw_labels(n, priors, rng)) {
    src.x.push_back(source_obs(jitter(means.row(k).transpose(), free_sd)));
    src.y.push_back(k);
    src.tie.push_back(kNoTie);
  }
  for (int k : draw_labels(n, priors, rng)) {
    tgt.x.push_back(target_obs(jitter(means.row(k).transpose(), free_sd)));
    tgt.y.push_back(k);
    tgt.tie.push_back(kNoTie);
  }
  std::uniform_int_distribution<std::size_t> pix(spec.object_min_pixels, spec.object_max_pixels);
  for (std::size_t o = 0; o < spec.objects; ++o) {
    const int k = static_cast<int>(o % c);
    const Vector obj = jitter(means.row(k).transpose(), spec.noise);
    for (auto* rows : {&src, &tgt}) {
      const std::size_t count = pix(rng);
      for (std::size_t i = 0; i < count; ++i) {
        const Vector r = jitter(obj, pixel_sd);
        rows->x.push_back(rows == &src ? source_obs(r) : target_obs(r));
        rows->y.push_back(k);
        rows->tie.push_back(static_cast<int>(o));
      }
    }
  }

  auto to_domain = [](const Rows& rows, int id) {
    Matrix f(static_cast<Index>(rows.x.size()), 3);
    for (std::size_t i = 0; i < rows.x.size(); ++i) f.row(static_cast<Index>(i)) = rows.x[i].transpose();
    DomainDataset d = DomainDataset::unlabeled(std::move(f), id);
    d.labels = rows.y;
    d.tie_object = rows.tie;
    return d;
  };
  SynthOutput out;
  DomainDataset s = to_domain(src, 0);
  s.band_tags = tags({"R", "G", "B"});
  DomainDataset t = to_domain(tgt, 1);
  t.band_tags = tags({"NIR", "R", "G"});
  out.truth = {s.labels, t.labels};
  t.labels.assign(t.size(), kUnlabeled);
  out.data.domains = {std::move(s), std::move(t)};
  out.labels_hidden = {false, true};
  out.tie_objects = spec.objects;
  return out;
}

SynthOutput generate(const SynthSpec& spec) {
  switch (spec.archetype) {
    case Archetype::MultiviewManifold: return gen_multiview(spec);
    case Archetype::ShadowAttenuation: return gen_shadow(spec);
    case Archetype::ColocatedTies: return gen_ties(spec);
  }
  return gen_multiview(spec);
}

}  // namespace manialign::synth
