#include "manialign/classify.hpp"

#include "manialign/error.hpp"
#include "manialign/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>

namespace manialign::classify {

namespace {

constexpr const char* kModule = "classify";

std::vector<int> distinct_classes(const std::vector<int>& y) {
  std::set<int> s(y.begin(), y.end());
  return {s.begin(), s.end()};
}

void check_training_set(const Matrix& z, const std::vector<int>& y, double c) {
  if (static_cast<std::size_t>(z.rows()) != y.size()) {
    throw Error(ErrorKind::LengthMismatch, kModule, "feature rows and label count differ");
  }
  if (!z.allFinite()) throw Error(ErrorKind::NonFinite, kModule, "training features contain NaN or Inf");
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::BadConfig, kModule, "C must be positive");
  if (distinct_classes(y).size() < 2) {
    throw Error(ErrorKind::SingleClass, kModule, "training labels contain fewer than two classes");
  }
}

// Dual coordinate descent for one binary problem; returns (w, b).
std::pair<Vector, double> binary_svm(const Matrix& z, const std::vector<double>& t, double c,
                                     const SvmOptions& opts) {
  const Index n = z.rows();
  const Index p = z.cols();
  Vector w = Vector::Zero(p);
  double b = 0.0;
  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
  std::vector<double> qdiag(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) qdiag[static_cast<std::size_t>(i)] = z.row(i).squaredNorm() + 1.0;

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(opts.seed);

  for (int epoch = 0; epoch < opts.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double max_violation = 0.0;
    for (Index i : order) {
      const auto si = static_cast<std::size_t>(i);
      const double yi = t[si];
      const double g = yi * (z.row(i).dot(w) + b) - 1.0;
      double pg = g;
      if (alpha[si] <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[si] >= c) {
        pg = std::max(g, 0.0);
      }
      max_violation = std::max(max_violation, std::abs(pg));
      if (pg == 0.0) continue;
      const double old = alpha[si];
      alpha[si] = std::clamp(old - g / qdiag[si], 0.0, c);
      const double delta = (alpha[si] - old) * yi;
      if (delta != 0.0) {
        w.noalias() += delta * z.row(i).transpose();
        b += delta;
      }
    }
    if (max_violation < opts.tolerance) break;
  }
  return {w, b};
}

ClassifierModel train_ovr(const Matrix& features, const std::vector<int>& y, double c, const SvmOptions& opts) {
  ClassifierModel model;
  model.classes = distinct_classes(y);
  model.c = c;
  const auto k = static_cast<Index>(model.classes.size());
  model.weights.resize(k, features.cols());
  model.biases.resize(k);
  std::vector<double> t(y.size());
  for (Index ci = 0; ci < k; ++ci) {
    const int cls = model.classes[static_cast<std::size_t>(ci)];
    for (std::size_t i = 0; i < y.size(); ++i) t[i] = y[i] == cls ? 1.0 : -1.0;
    auto [w, b] = binary_svm(features, t, c, opts);
    model.weights.row(ci) = w.transpose();
    model.biases(ci) = b;
  }
  return model;
}

std::vector<int> argmax_rows(const Matrix& scores, const std::vector<int>& classes) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    for (Index c = 1; c < scores.cols(); ++c)
      if (scores(i, c) > scores(i, best)) best = c;
    out[static_cast<std::size_t>(i)] = classes[static_cast<std::size_t>(best)];
  }
  return out;
}

Matrix rows_of(const Matrix& z, const std::vector<std::size_t>& idx, Index cols) {
  Matrix out(static_cast<Index>(idx.size()), cols);
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Index>(r)) = z.row(static_cast<Index>(idx[r])).head(cols);
  return out;
}

}  // namespace

double hinge_objective(const Matrix& z, const std::vector<double>& targets, const Vector& w, double b, double c) {
  double loss = 0.0;
  for (Index i = 0; i < z.rows(); ++i) {
    loss += std::max(0.0, 1.0 - targets[static_cast<std::size_t>(i)] * (z.row(i).dot(w) + b));
  }
  return 0.5 * (w.squaredNorm() + b * b) + c * loss;
}

ClassifierModel train_linear_svm(const Matrix& z, const std::vector<int>& y, double c, const SvmOptions& opts) {
  check_training_set(z, y, c);
  ClassifierModel model = train_ovr(z, y, c, opts);
  model.kind = ClassifierKind::LinearSvm;
  model.p_used = static_cast<std::size_t>(z.cols());
  return model;
}

ClassifierModel train_kernel_svm(const Matrix& z, const std::vector<int>& y, double c,
                                 const kernels::KernelSpec& spec, const SvmOptions& opts) {
  check_training_set(z, y, c);
  if (!spec.resolved()) throw Error(ErrorKind::BadConfig, kModule, "kernel svm needs a resolved kernel spec");
  const Matrix features = kernels::gram(z, z, spec);
  ClassifierModel model = train_ovr(features, y, c, opts);
  model.kind = ClassifierKind::KernelSvm;
  model.prototypes = z;
  model.prototype_labels = y;
  model.kernel = spec;
  model.p_used = static_cast<std::size_t>(z.cols());
  return model;
}

ClassifierModel train_onenn(const Matrix& z, const std::vector<int>& y) {
  if (static_cast<std::size_t>(z.rows()) != y.size()) {
    throw Error(ErrorKind::LengthMismatch, kModule, "feature rows and label count differ");
  }
  if (!z.allFinite()) throw Error(ErrorKind::NonFinite, kModule, "training features contain NaN or Inf");
  if (distinct_classes(y).size() < 2) {
    throw Error(ErrorKind::SingleClass, kModule, "training labels contain fewer than two classes");
  }
  ClassifierModel model;
  model.kind = ClassifierKind::OneNN;
  model.classes = distinct_classes(y);
  model.prototypes = z;
  model.prototype_labels = y;
  model.p_used = static_cast<std::size_t>(z.cols());
  return model;
}

Matrix decision_scores(const ClassifierModel& model, const Matrix& z) {
  if (z.rows() > 0 && static_cast<std::size_t>(z.cols()) != model.p_used) {
    throw Error(ErrorKind::DimensionMismatch, kModule,
                "classifier expects " + std::to_string(model.p_used) + " features, got " + std::to_string(z.cols()));
  }
  const auto k = static_cast<Index>(model.classes.size());
  switch (model.kind) {
    case ClassifierKind::LinearSvm: {
      Matrix s = z * model.weights.transpose();
      s.rowwise() += model.biases.transpose();
      return s;
    }
    case ClassifierKind::KernelSvm: {
      Matrix s = kernels::gram(z, model.prototypes, model.kernel) * model.weights.transpose();
      s.rowwise() += model.biases.transpose();
      return s;
    }
    case ClassifierKind::OneNN: {
      const Matrix d2 = parallel::squared_distances(z, model.prototypes);
      Matrix s = Matrix::Constant(z.rows(), k, -std::numeric_limits<double>::infinity());
      for (Index j = 0; j < d2.cols(); ++j) {
        const int lbl = model.prototype_labels[static_cast<std::size_t>(j)];
        const auto ci = static_cast<Index>(std::lower_bound(model.classes.begin(), model.classes.end(), lbl) -
                                           model.classes.begin());
        for (Index i = 0; i < z.rows(); ++i) s(i, ci) = std::max(s(i, ci), -d2(i, j));
      }
      return s;
    }
  }
  return {};
}

std::vector<int> predict(const ClassifierModel& model, const Matrix& z) {
  if (z.rows() == 0) return {};
  return argmax_rows(decision_scores(model, z), model.classes);
}

std::vector<std::size_t> stratified_folds(const std::vector<int>& y, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorKind::BadConfig, kModule, "cross-validation needs at least 2 folds");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> fold(y.size(), 0);
  for (int cls : distinct_classes(y)) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == cls) idx.push_back(i);
    if (idx.size() < folds) {
      throw Error(ErrorKind::TooFewPerClass, kModule,
                  "class " + std::to_string(cls) + " has " + std::to_string(idx.size()) + " samples for " +
                      std::to_string(folds) + " folds");
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t t = 0; t < idx.size(); ++t) fold[idx[t]] = t % folds;
  }
  return fold;
}

CvResult cross_validate(const Matrix& z, const std::vector<int>& y, const CvGrid& grid, std::size_t folds,
                        std::uint64_t seed, const SvmOptions& opts) {
  if (static_cast<std::size_t>(z.rows()) != y.size()) {
    throw Error(ErrorKind::LengthMismatch, kModule, "feature rows and label count differ");
  }
  if (grid.p_values.empty() || grid.c_values.empty()) {
    throw Error(ErrorKind::BadConfig, kModule, "cross-validation grid needs p and C values");
  }
  const auto fold = stratified_folds(y, folds, seed);
  std::vector<std::vector<std::size_t>> train_idx(folds);
  std::vector<std::vector<std::size_t>> test_idx(folds);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t f = 0; f < folds; ++f) (fold[i] == f ? test_idx[f] : train_idx[f]).push_back(i);

  std::vector<std::optional<double>> sigmas;
  if (grid.sigma_values.empty()) {
    sigmas.push_back(std::nullopt);
  } else {
    for (double s : grid.sigma_values) sigmas.emplace_back(s);
  }

  CvResult result;
  bool have_best = false;
  for (std::size_t p_req : grid.p_values) {
    const std::size_t p = std::clamp<std::size_t>(p_req, 1, static_cast<std::size_t>(z.cols()));
    for (double c : grid.c_values) {
      for (const auto& sigma : sigmas) {
        double acc_sum = 0.0;
        for (std::size_t f = 0; f < folds; ++f) {
          const Matrix ztr = rows_of(z, train_idx[f], static_cast<Index>(p));
          const Matrix zte = rows_of(z, test_idx[f], static_cast<Index>(p));
          std::vector<int> ytr;
          for (std::size_t i : train_idx[f]) ytr.push_back(y[i]);
          const ClassifierModel m = sigma ? train_kernel_svm(ztr, ytr, c, kernels::KernelSpec::rbf(*sigma), opts)
                                          : train_linear_svm(ztr, ytr, c, opts);
          const auto pred = predict(m, zte);
          std::size_t correct = 0;
          for (std::size_t t = 0; t < pred.size(); ++t) correct += pred[t] == y[test_idx[f][t]];
          acc_sum += static_cast<double>(correct) / static_cast<double>(pred.size());
        }
        GridCell cell{p, c, sigma, acc_sum / static_cast<double>(folds)};
        result.table.push_back(cell);
        auto better = [](const GridCell& a, const GridCell& b) {
          if (a.mean_accuracy != b.mean_accuracy) return a.mean_accuracy > b.mean_accuracy;
          if (a.p != b.p) return a.p < b.p;
          if (a.c != b.c) return a.c < b.c;
          return a.sigma.value_or(0.0) < b.sigma.value_or(0.0);
        };
        if (!have_best || better(cell, result.best)) {
          result.best = cell;
          have_best = true;
        }
      }
    }
  }
  return result;
}

double cohen_kappa(const std::vector<std::vector<std::size_t>>& confusion) {
  const std::size_t k = confusion.size();
  double n = 0.0;
  double diag = 0.0;
  std::vector<double> rows(k, 0.0);
  std::vector<double> cols(k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const auto v = static_cast<double>(confusion[i][j]);
      n += v;
      rows[i] += v;
      cols[j] += v;
      if (i == j) diag += v;
    }
  if (n == 0.0) return 0.0;
  const double po = diag / n;
  double pe = 0.0;
  for (std::size_t i = 0; i < k; ++i) pe += rows[i] * cols[i];
  pe /= n * n;
  if (pe >= 1.0) return po >= 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

EvalReport evaluate(const std::vector<int>& predicted, const std::vector<int>& truth,
                    const std::vector<std::size_t>& domain_of) {
  if (predicted.size() != truth.size() || domain_of.size() != truth.size()) {
    throw Error(ErrorKind::LengthMismatch, kModule, "prediction, truth and domain vectors differ in length");
  }
  EvalReport r;
  std::set<int> cls(truth.begin(), truth.end());
  cls.insert(predicted.begin(), predicted.end());
  r.classes.assign(cls.begin(), cls.end());
  const std::size_t k = r.classes.size();
  auto pos = [&](int c) {
    return static_cast<std::size_t>(std::lower_bound(r.classes.begin(), r.classes.end(), c) - r.classes.begin());
  };

  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  std::map<std::size_t, std::vector<std::vector<std::size_t>>> dom_conf;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t a = pos(truth[i]);
    const std::size_t b = pos(predicted[i]);
    ++r.confusion[a][b];
    auto [it, inserted] = dom_conf.try_emplace(domain_of[i], k, std::vector<std::size_t>(k, 0));
    ++it->second[a][b];
  }
  auto oa_of = [k](const std::vector<std::vector<std::size_t>>& c) {
    std::size_t total = 0;
    std::size_t diag = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        total += c[i][j];
        if (i == j) diag += c[i][j];
      }
    return std::pair{total ? static_cast<double>(diag) / static_cast<double>(total) : 0.0, total};
  };
  r.overall_accuracy = oa_of(r.confusion).first;
  r.kappa = cohen_kappa(r.confusion);
  for (const auto& [dom, conf] : dom_conf) {
    const auto [oa, total] = oa_of(conf);
    r.per_domain[dom] = DomainScore{oa, cohen_kappa(conf), total};
  }
  return r;
}

}  // namespace manialign::classify
