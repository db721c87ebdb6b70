#include "manialign/protocol.hpp"

#include "manialign/baselines.hpp"
#include "manialign/error.hpp"
#include "manialign/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>

namespace manialign::protocol {

namespace {

constexpr const char* kModule = "cli";

std::size_t labeled_count_for(const ExperimentConfig& cfg, std::size_t m) {
  if (cfg.labeled_per_class.empty()) return 0;
  return cfg.labeled_per_class[std::min(m, cfg.labeled_per_class.size() - 1)];
}

Matrix rows_of(const Matrix& x, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = x.row(static_cast<Index>(rows[r]));
  return out;
}

Matrix vstack(const std::vector<Matrix>& blocks) {
  Index rows = 0;
  const Index cols = blocks.empty() ? 0 : blocks.front().cols();
  for (const auto& b : blocks) rows += b.rows();
  Matrix out(rows, cols);
  Index r = 0;
  for (const auto& b : blocks) {
    out.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  return out;
}

bool trains_classifier(const ExperimentConfig& cfg, std::size_t m) {
  return cfg.train_on == TrainOn::Pooled || m == cfg.leading_domain;
}

// Per-domain features -> classifier training and test matrices.
struct Assembled {
  Matrix z_train;
  std::vector<int> y_train;
  Matrix z_val;  // labeled rows of domains that do not train the classifier
  std::vector<int> y_val;
  Matrix z_test;
  std::vector<int> y_test;
  std::vector<std::size_t> test_domain;
};

Assembled assemble(const TrialSplit& split, const ExperimentConfig& cfg, const std::vector<Matrix>& train_feats,
                   const std::vector<Matrix>& test_feats) {
  Assembled a;
  std::vector<Matrix> tr;
  std::vector<Matrix> va;
  std::vector<Matrix> te;
  for (std::size_t m = 0; m < split.train.num_domains(); ++m) {
    const bool trains = trains_classifier(cfg, m);
    std::vector<std::size_t> rows;
    const auto& lab = split.train.domains[m].labels;
    for (std::size_t i = 0; i < lab.size(); ++i) {
      if (lab[i] != kUnlabeled) {
        rows.push_back(i);
        (trains ? a.y_train : a.y_val).push_back(lab[i]);
      }
    }
    (trains ? tr : va).push_back(rows_of(train_feats[m], rows));
    te.push_back(test_feats[m]);
    for (int l : split.test.domains[m].labels) {
      a.y_test.push_back(l);
      a.test_domain.push_back(m);
    }
  }
  a.z_train = vstack(tr);
  a.z_val = vstack(va);
  a.z_test = vstack(te);
  return a;
}

MethodResult score_assembled(const Assembled& a, const ExperimentConfig& cfg, const classify::CvGrid& grid,
                             std::size_t curve_dims, std::uint64_t seed) {
  if (!a.y_val.empty()) {
    return classify_and_score_validated(a.z_train, a.y_train, a.z_val, a.y_val, a.z_test, a.y_test, a.test_domain,
                                        cfg.leading_domain, grid, cfg.standardize, curve_dims, seed, cfg.svm,
                                        cfg.p_tolerance);
  }
  return classify_and_score(a.z_train, a.y_train, a.z_test, a.y_test, a.test_domain, cfg.leading_domain, grid,
                            cfg.folds, cfg.standardize, curve_dims, seed, cfg.svm, cfg.p_tolerance);
}

std::vector<Matrix> features_of(const MultiDomainCollection& c) { return c.feature_blocks(); }

classify::CvGrid grid_for(const classify::CvGrid& base, std::size_t max_p) {
  classify::CvGrid g = base;
  std::set<std::size_t> ps;
  for (std::size_t p : base.p_values) ps.insert(std::clamp<std::size_t>(p, 1, max_p));
  if (ps.empty()) ps.insert(max_p);
  g.p_values.assign(ps.begin(), ps.end());
  return g;
}

MethodResult latent_method(const TrialSplit& split, const ExperimentConfig& cfg, Method method,
                           std::uint64_t seed) {
  alignment::FitConfig fc = cfg.fit;
  fc.seed = seed;
  if (method == Method::Ssma) {
    fc.mode = alignment::Mode::PrimalSsma;
  } else {
    fc.mode = alignment::Mode::DualKema;
    if (method == Method::KemaLinear) {
      fc.kernels = {kernels::KernelSpec::linear()};
    } else if (fc.kernels.empty() ||
               std::any_of(fc.kernels.begin(), fc.kernels.end(),
                           [](const kernels::KernelSpec& s) { return s.kind != kernels::KernelKind::Rbf; })) {
      fc.kernels = {kernels::KernelSpec::rbf_half_median()};
    }
  }
  const auto model = alignment::fit(split.train, fc);
  std::vector<Matrix> tr;
  std::vector<Matrix> te;
  for (std::size_t m = 0; m < split.train.num_domains(); ++m) {
    tr.push_back(alignment::transform(model, m, split.train.domains[m].features).coordinates);
    te.push_back(alignment::transform(model, m, split.test.domains[m].features).coordinates);
  }
  const auto a = assemble(split, cfg, tr, te);
  auto r = score_assembled(a, cfg, grid_for(cfg.grid, model.p), cfg.curve_max_dims, seed);
  r.method = method;
  return r;
}

MethodResult raw_method(const TrialSplit& split, const ExperimentConfig& cfg, Method method, std::uint64_t seed) {
  const MultiDomainCollection train = baselines::common_band_subset(split.train);
  const MultiDomainCollection test = baselines::common_band_subset(split.test);
  std::vector<Matrix> tr = features_of(train);
  std::vector<Matrix> te = features_of(test);
  if (method == Method::HistogramMatching) {
    const MultiDomainCollection pool = baselines::common_band_subset(split.pool);
    const std::size_t lead = cfg.leading_domain;
    for (std::size_t m = 0; m < tr.size(); ++m) {
      if (m == lead) continue;
      // Source: every non-test sample of domain m; reference: the leading domain's.
      const auto map = baselines::histogram_match(pool.domains[m].features, pool.domains[lead].features, cfg.hm_bins);
      tr[m] = map.apply(tr[m]);
      te[m] = map.apply(te[m]);
    }
  }
  const auto a = assemble(split, cfg, tr, te);
  const auto d = static_cast<std::size_t>(a.z_train.cols());
  classify::CvGrid g = cfg.grid;
  g.p_values = {d};
  auto r = score_assembled(a, cfg, g, 0, seed);
  r.method = method;
  return r;
}

MethodResult kcca_method(const TrialSplit& split, const ExperimentConfig& cfg, std::uint64_t seed) {
  if (split.train.num_domains() != 2) {
    throw Error(ErrorKind::BadConfig, kModule, "kCCA baseline needs exactly two domains");
  }
  std::map<int, std::vector<std::size_t>> rows_a;
  std::map<int, std::vector<std::size_t>> rows_b;
  const auto& da = split.train.domains[0];
  const auto& db = split.train.domains[1];
  for (std::size_t i = 0; i < da.size(); ++i)
    if (da.tie_object[i] != kNoTie) rows_a[da.tie_object[i]].push_back(i);
  for (std::size_t i = 0; i < db.size(); ++i)
    if (db.tie_object[i] != kNoTie) rows_b[db.tie_object[i]].push_back(i);
  std::vector<Vector> pa;
  std::vector<Vector> pb;
  for (const auto& [obj, ra] : rows_a) {
    const auto it = rows_b.find(obj);
    if (it == rows_b.end()) continue;
    pa.push_back(baselines::tie_representative(rows_of(da.features, ra)));
    pb.push_back(baselines::tie_representative(rows_of(db.features, it->second)));
  }
  if (pa.empty()) throw Error(ErrorKind::NoTies, kModule, "kCCA baseline needs tie objects in both domains");
  Matrix a(static_cast<Index>(pa.size()), da.features.cols());
  Matrix b(static_cast<Index>(pb.size()), db.features.cols());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    a.row(static_cast<Index>(i)) = pa[i].transpose();
    b.row(static_cast<Index>(i)) = pb[i].transpose();
  }
  const auto spec_a = kernels::resolve(kernels::KernelSpec::rbf_half_median(), a, seed);
  const auto spec_b = kernels::resolve(kernels::KernelSpec::rbf_half_median(), b, seed + 1);
  std::size_t max_p = 1;
  for (std::size_t p : cfg.grid.p_values) max_p = std::max(max_p, p);
  max_p = std::min<std::size_t>(max_p, pa.size() - 1);
  const auto proj = baselines::fit_kcca(a, b, spec_a, spec_b, cfg.kcca_eps, std::max<std::size_t>(max_p, 1));
  std::vector<Matrix> tr{proj.transform(0, da.features), proj.transform(1, db.features)};
  std::vector<Matrix> te{proj.transform(0, split.test.domains[0].features),
                         proj.transform(1, split.test.domains[1].features)};
  const auto as = assemble(split, cfg, tr, te);
  auto r = score_assembled(as, cfg, grid_for(cfg.grid, proj.p), cfg.curve_max_dims, seed);
  r.method = Method::Kcca;
  return r;
}

// Classifier trained directly on target labels drawn from the target pool.
MethodResult oracle_method(const TrialSplit& split, const ExperimentConfig& cfg, std::uint64_t seed) {
  const std::size_t per_class = labeled_count_for(cfg, cfg.leading_domain);
  Matrix z_train;
  std::vector<int> y_train;
  std::vector<Matrix> te;
  std::vector<int> y_test;
  std::vector<std::size_t> test_domain;
  std::vector<Matrix> tr;
  for (std::size_t m = 0; m < split.pool.num_domains(); ++m) {
    if (m == cfg.leading_domain) continue;
    const auto& pool = split.pool.domains[m];
    std::map<int, std::size_t> taken;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[pool.labels[i]]++ < per_class) {
        rows.push_back(i);
        y_train.push_back(pool.labels[i]);
      }
    }
    tr.push_back(rows_of(pool.features, rows));
    te.push_back(split.test.domains[m].features);
    for (int l : split.test.domains[m].labels) {
      y_test.push_back(l);
      test_domain.push_back(m);
    }
  }
  if (tr.empty()) throw Error(ErrorKind::BadConfig, kModule, "target oracle needs a non-leading domain");
  const std::size_t d0 = static_cast<std::size_t>(tr.front().cols());
  for (const auto& t : tr)
    if (static_cast<std::size_t>(t.cols()) != d0) {
      throw Error(ErrorKind::DimensionMismatch, kModule, "target oracle needs equal target dimensions");
    }
  z_train = vstack(tr);
  classify::CvGrid g = cfg.grid;
  g.p_values = {d0};
  auto r = classify_and_score(z_train, y_train, vstack(te), y_test, test_domain, cfg.leading_domain, g, cfg.folds,
                              cfg.standardize, 0, seed, cfg.svm, cfg.p_tolerance);
  r.method = Method::TargetOracle;
  return r;
}

void standardize_columns(Matrix& train, std::initializer_list<Matrix*> others) {
  for (Index c = 0; c < train.cols(); ++c) {
    const double mean = train.col(c).mean();
    const double var = (train.col(c).array() - mean).square().mean();
    const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
    train.col(c) = (train.col(c).array() - mean) / sd;
    for (Matrix* o : others) o->col(c) = (o->col(c).array() - mean) / sd;
  }
}

classify::EvalReport score(const std::vector<int>& pred, const std::vector<int>& truth,
                           const std::vector<std::size_t>& domain, bool transfer_only, std::size_t lead) {
  std::vector<int> p;
  std::vector<int> t;
  std::vector<std::size_t> d;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (transfer_only && domain[i] == lead) continue;
    p.push_back(pred[i]);
    t.push_back(truth[i]);
    d.push_back(domain[i]);
  }
  return classify::evaluate(p, t, d);
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::NoAdaptation: return "no_adaptation";
    case Method::HistogramMatching: return "histogram_matching";
    case Method::Ssma: return "ssma";
    case Method::KemaLinear: return "kema_linear";
    case Method::KemaRbf: return "kema_rbf";
    case Method::Kcca: return "kcca";
    case Method::TargetOracle: return "target_oracle";
  }
  return "kema_rbf";
}

Method method_from_string(const std::string& s) {
  for (Method m : {Method::NoAdaptation, Method::HistogramMatching, Method::Ssma, Method::KemaLinear, Method::KemaRbf,
                   Method::Kcca, Method::TargetOracle})
    if (to_string(m) == s) return m;
  throw Error(ErrorKind::BadConfig, kModule, "unknown method '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorKind::BadConfig, kModule, "test_fraction must lie in (0, 1)");
  }
  if (folds < 2) throw Error(ErrorKind::BadConfig, kModule, "cross-validation needs at least 2 folds");
  if (grid.c_values.empty()) throw Error(ErrorKind::BadConfig, kModule, "C grid is empty");
  for (double c : grid.c_values)
    if (!(c > 0.0)) throw Error(ErrorKind::BadConfig, kModule, "C values must be positive");
  if (methods.empty()) throw Error(ErrorKind::BadConfig, kModule, "no methods selected");
  if (fit.k == 0) throw Error(ErrorKind::BadConfig, kModule, "k must be positive");
  if (!(fit.mu >= 0.0)) throw Error(ErrorKind::BadConfig, kModule, "mu must be non-negative");
}

classify::CvGrid default_grid() {
  classify::CvGrid g;
  g.p_values = {1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20};
  g.c_values = {0.1, 1.0, 10.0, 100.0};
  return g;
}

ExperimentConfig default_experiment(synth::Archetype a) {
  ExperimentConfig c;
  c.grid = default_grid();
  switch (a) {
    case synth::Archetype::MultiviewManifold:
      c.labeled_per_class = {20, 5};
      c.unlabeled_per_domain = 150;
      c.train_on = TrainOn::Pooled;
      c.methods = {Method::NoAdaptation, Method::Ssma, Method::KemaLinear, Method::KemaRbf};
      break;
    case synth::Archetype::ShadowAttenuation:
      c.labeled_per_class = {40, 20};
      c.unlabeled_per_domain = 100;
      c.train_on = TrainOn::SourceOnly;
      c.methods = {Method::NoAdaptation, Method::HistogramMatching, Method::Ssma, Method::KemaRbf};
      break;
    case synth::Archetype::ColocatedTies:
      c.labeled_per_class = {50, 0};
      c.unlabeled_per_domain = 100;
      c.train_on = TrainOn::SourceOnly;
      c.methods = {Method::NoAdaptation, Method::Kcca, Method::KemaRbf, Method::TargetOracle};
      break;
  }
  return c;
}

TrialSplit make_split(const MultiDomainCollection& data, const std::vector<std::vector<int>>& truth,
                      const std::vector<bool>& hidden, const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  data.validate(2);
  if (truth.size() != data.num_domains() || hidden.size() != data.num_domains()) {
    throw Error(ErrorKind::LengthMismatch, kModule, "truth and hidden flags need one entry per domain");
  }
  if (cfg.leading_domain >= data.num_domains()) {
    throw Error(ErrorKind::UnknownDomain, kModule, "leading domain out of range");
  }
  TrialSplit s;
  std::mt19937_64 rng(seed);
  for (std::size_t m = 0; m < data.num_domains(); ++m) {
    const auto& dom = data.domains[m];
    if (truth[m].size() != dom.size()) {
      throw Error(ErrorKind::LengthMismatch, kModule, "truth length differs from domain size");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    std::vector<std::size_t> tie_rows;
    for (std::size_t i = 0; i < dom.size(); ++i) {
      if (dom.tie_object[i] != kNoTie) {
        tie_rows.push_back(i);
      } else {
        by_class[truth[m][i]].push_back(i);
      }
    }
    std::vector<std::size_t> test_rows;
    std::vector<std::size_t> pool_rows;
    std::vector<std::size_t> labeled_rows;
    std::set<std::size_t> labeled_set;
    const std::size_t per_class = hidden[m] ? 0 : labeled_count_for(cfg, m);
    for (auto& [cls, rows] : by_class) {
      std::shuffle(rows.begin(), rows.end(), rng);
      const auto n_test = static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(rows.size())));
      test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
      const std::size_t available = rows.size() - n_test;
      if (per_class > available) {
        throw Error(ErrorKind::TooFewPerClass, kModule,
                    "domain " + std::to_string(m) + " class " + std::to_string(cls) + " has " +
                        std::to_string(available) + " training samples, " + std::to_string(per_class) +
                        " labeled requested");
      }
      for (std::size_t j = n_test; j < rows.size(); ++j) {
        pool_rows.push_back(rows[j]);
        if (j - n_test < per_class) {
          labeled_rows.push_back(rows[j]);
          labeled_set.insert(rows[j]);
        }
      }
    }
    std::vector<std::size_t> rest;
    for (std::size_t r : pool_rows)
      if (!labeled_set.count(r)) rest.push_back(r);
    std::vector<std::size_t> unlabeled_rows;
    if (!rest.empty() && cfg.unlabeled_per_domain > 0) {
      const std::size_t u = std::min(cfg.unlabeled_per_domain, rest.size());
      const Matrix xr = rows_of(dom.features, rest);
      for (std::size_t j : sampling::select_unlabeled(xr, u, seed + 7919 * (m + 1))) unlabeled_rows.push_back(rest[j]);
    }

    std::vector<std::size_t> train_rows = labeled_rows;
    train_rows.insert(train_rows.end(), unlabeled_rows.begin(), unlabeled_rows.end());
    train_rows.insert(train_rows.end(), tie_rows.begin(), tie_rows.end());
    DomainDataset tr = dom.subset(train_rows);
    for (std::size_t i = 0; i < train_rows.size(); ++i) tr.labels[i] = i < labeled_rows.size() ? truth[m][train_rows[i]] : kUnlabeled;
    DomainDataset te = dom.subset(test_rows);
    for (std::size_t i = 0; i < test_rows.size(); ++i) te.labels[i] = truth[m][test_rows[i]];
    DomainDataset po = dom.subset(pool_rows);
    for (std::size_t i = 0; i < pool_rows.size(); ++i) po.labels[i] = truth[m][pool_rows[i]];
    s.train.domains.push_back(std::move(tr));
    s.test.domains.push_back(std::move(te));
    s.pool.domains.push_back(std::move(po));
  }
  return s;
}

namespace {

MethodResult finish(const Matrix& tr, const std::vector<int>& y_train, const Matrix& te,
                    const std::vector<int>& y_test, const std::vector<std::size_t>& test_domain,
                    std::size_t leading_domain, const classify::GridCell& chosen, std::size_t curve_dims,
                    const classify::SvmOptions& opts) {
  MethodResult r;
  r.chosen = chosen;
  auto fit_predict = [&](std::size_t p, double c) {
    const auto pi = static_cast<Index>(std::min<std::size_t>(p, static_cast<std::size_t>(tr.cols())));
    const auto model = chosen.sigma ? classify::train_kernel_svm(tr.leftCols(pi), y_train, c,
                                                                kernels::KernelSpec::rbf(*chosen.sigma), opts)
                                    : classify::train_linear_svm(tr.leftCols(pi), y_train, c, opts);
    return classify::predict(model, te.leftCols(pi));
  };
  const auto pred = fit_predict(chosen.p, chosen.c);
  r.transfer = score(pred, y_test, test_domain, true, leading_domain);
  r.all = score(pred, y_test, test_domain, false, leading_domain);
  const auto max_curve = std::min<std::size_t>(curve_dims, static_cast<std::size_t>(tr.cols()));
  for (std::size_t p = 1; p <= max_curve; ++p)
    r.curve.push_back(score(fit_predict(p, chosen.c), y_test, test_domain, true, leading_domain).overall_accuracy);
  return r;
}

}  // namespace

MethodResult classify_and_score(const Matrix& z_train, const std::vector<int>& y_train, const Matrix& z_test,
                                const std::vector<int>& y_test, const std::vector<std::size_t>& test_domain,
                                std::size_t leading_domain, const classify::CvGrid& grid, std::size_t folds,
                                bool standardize, std::size_t curve_dims, std::uint64_t seed,
                                const classify::SvmOptions& svm, double p_tolerance) {
  Matrix tr = z_train;
  Matrix te = z_test;
  if (standardize) standardize_columns(tr, {&te});
  classify::SvmOptions opts = svm;
  opts.seed = seed;
  const auto cv = classify::cross_validate(tr, y_train, grid, folds, seed, opts);
  return finish(tr, y_train, te, y_test, test_domain, leading_domain, pick_cell(cv, p_tolerance), curve_dims, opts);
}

MethodResult classify_and_score_validated(const Matrix& z_train, const std::vector<int>& y_train,
                                          const Matrix& z_val, const std::vector<int>& y_val, const Matrix& z_test,
                                          const std::vector<int>& y_test, const std::vector<std::size_t>& test_domain,
                                          std::size_t leading_domain, const classify::CvGrid& grid,
                                          bool standardize, std::size_t curve_dims, std::uint64_t seed,
                                          const classify::SvmOptions& svm, double p_tolerance) {
  if (z_val.rows() == 0 || static_cast<std::size_t>(z_val.rows()) != y_val.size()) {
    throw Error(ErrorKind::LengthMismatch, kModule, "validation rows and labels differ or are empty");
  }
  Matrix tr = z_train;
  Matrix va = z_val;
  Matrix te = z_test;
  if (standardize) standardize_columns(tr, {&va, &te});
  classify::SvmOptions opts = svm;
  opts.seed = seed;
  std::vector<std::optional<double>> sigmas;
  if (grid.sigma_values.empty()) sigmas.push_back(std::nullopt);
  for (double sg : grid.sigma_values) sigmas.emplace_back(sg);
  classify::CvResult table;
  bool have = false;
  for (std::size_t p_req : grid.p_values) {
    const auto p = std::clamp<std::size_t>(p_req, 1, static_cast<std::size_t>(tr.cols()));
    const auto pi = static_cast<Index>(p);
    for (double c : grid.c_values) {
      for (const auto& sigma : sigmas) {
        const auto model = sigma ? classify::train_kernel_svm(tr.leftCols(pi), y_train, c,
                                                              kernels::KernelSpec::rbf(*sigma), opts)
                                 : classify::train_linear_svm(tr.leftCols(pi), y_train, c, opts);
        const auto pred = classify::predict(model, va.leftCols(pi));
        std::size_t ok = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == y_val[i];
        const classify::GridCell cell{p, c, sigma, static_cast<double>(ok) / static_cast<double>(pred.size())};
        table.table.push_back(cell);
        // Table order is p, C, sigma ascending, so strict improvement keeps the smaller values on ties.
        if (!have || cell.mean_accuracy > table.best.mean_accuracy) {
          table.best = cell;
          have = true;
        }
      }
    }
  }
  return finish(tr, y_train, te, y_test, test_domain, leading_domain, pick_cell(table, p_tolerance), curve_dims,
                opts);
}

classify::GridCell pick_cell(const classify::CvResult& cv, double tolerance) {
  const double floor = cv.best.mean_accuracy - tolerance;
  std::size_t p = cv.best.p;
  for (const auto& c : cv.table)
    if (c.mean_accuracy >= floor) p = std::min(p, c.p);
  if (p == cv.best.p) return cv.best;
  const classify::GridCell* pick = nullptr;
  for (const auto& c : cv.table)
    if (c.p == p && (!pick || c.mean_accuracy > pick->mean_accuracy)) pick = &c;
  return *pick;
}

TrialResult run_trial(const TrialSplit& split, const ExperimentConfig& cfg, std::uint64_t seed) {
  TrialResult t;
  for (Method m : cfg.methods) {
    switch (m) {
      case Method::NoAdaptation:
      case Method::HistogramMatching: t.methods.push_back(raw_method(split, cfg, m, seed)); break;
      case Method::Ssma:
      case Method::KemaLinear:
      case Method::KemaRbf: t.methods.push_back(latent_method(split, cfg, m, seed)); break;
      case Method::Kcca: t.methods.push_back(kcca_method(split, cfg, seed)); break;
      case Method::TargetOracle: t.methods.push_back(oracle_method(split, cfg, seed)); break;
    }
  }
  return t;
}

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (v.empty()) return;
  const double shift = v.front();
  double offset = 0.0;
  for (double x : v) offset += x - shift;
  offset /= static_cast<double>(v.size());
  for (double x : v) sd += (x - shift - offset) * (x - shift - offset);
  mean = shift + offset;
  sd = std::sqrt(sd / static_cast<double>(v.size()));
}

const MethodSummary& ExperimentResult::get(Method m) const {
  for (const auto& s : methods)
    if (s.method == m) return s;
  throw Error(ErrorKind::BadConfig, kModule, "method " + to_string(m) + " was not run");
}

ExperimentResult run_experiment(const synth::SynthSpec& spec, const ExperimentConfig& cfg, std::size_t reps) {
  cfg.validate();
  if (reps == 0) throw Error(ErrorKind::BadConfig, kModule, "at least one repetition is needed");
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult out;
  out.trials.resize(reps);
  std::vector<std::exception_ptr> errors(reps);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t r = 0; r < reps; ++r) {
    try {
      synth::SynthSpec s = spec;
      s.seed = spec.seed + r;
      const auto data = synth::generate(s);
      const auto split = make_split(data.data, data.truth, data.labels_hidden, cfg, cfg.seed + r);
      out.trials[r] = run_trial(split, cfg, cfg.seed + r);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
    MethodSummary s;
    s.method = cfg.methods[k];
    std::vector<double> kap;
    std::size_t curve_len = SIZE_MAX;
    for (const auto& t : out.trials) {
      s.oa_per_rep.push_back(t.methods[k].transfer.overall_accuracy);
      kap.push_back(t.methods[k].transfer.kappa);
      curve_len = std::min(curve_len, t.methods[k].curve.size());
    }
    mean_std(s.oa_per_rep, s.mean_oa, s.std_oa);
    mean_std(kap, s.mean_kappa, s.std_kappa);
    for (std::size_t p = 0; p < curve_len; ++p) {
      std::vector<double> v;
      for (const auto& t : out.trials) v.push_back(t.methods[k].curve[p]);
      double mu = 0.0;
      double sd = 0.0;
      mean_std(v, mu, sd);
      s.curve_mean.push_back(mu);
      s.curve_std.push_back(sd);
    }
    out.methods.push_back(std::move(s));
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace manialign::protocol
