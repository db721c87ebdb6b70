#pragma once

#include "manialign/kernels.hpp"
#include "manialign/types.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace manialign::classify {

enum class ClassifierKind { LinearSvm, OneNN, KernelSvm };

struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::LinearSvm;
  std::vector<int> classes;   // sorted class ids, one row of `weights` each
  Matrix weights;             // classes x features (features = p, or #prototypes for kernel svm)
  Vector biases;
  Matrix prototypes;          // training rows for OneNN and KernelSvm
  std::vector<int> prototype_labels;
  kernels::KernelSpec kernel = kernels::KernelSpec::linear();
  double c = 1.0;
  std::size_t p_used = 0;
};

struct SvmOptions {
  double tolerance = 1e-6;     // max projected-gradient violation
  int max_epochs = 20000;
  std::uint64_t seed = 0;      // coordinate order
};

/// One-vs-rest L2-regularized hinge loss, bias as an extra unit feature:
///   min 0.5 |w|^2 + 0.5 b^2 + C sum max(0, 1 - y (w.x + b))
/// solved by dual coordinate descent.
ClassifierModel train_linear_svm(const Matrix& z, const std::vector<int>& y, double c, const SvmOptions& opts = {});

/// Binary primal objective above for a given (w, b) and +-1 targets.
double hinge_objective(const Matrix& z, const std::vector<double>& targets, const Vector& w, double b, double c);

/// Linear SVM on the kernel features k(z, prototypes), prototypes = z.
ClassifierModel train_kernel_svm(const Matrix& z, const std::vector<int>& y, double c,
                                 const kernels::KernelSpec& spec, const SvmOptions& opts = {});

ClassifierModel train_onenn(const Matrix& z, const std::vector<int>& y);

/// Per-class scores (rows: samples, cols: classes). For OneNN the score is
/// minus the distance to the nearest prototype of each class.
Matrix decision_scores(const ClassifierModel& model, const Matrix& z);

/// Argmax of the scores; ties go to the lowest class id.
std::vector<int> predict(const ClassifierModel& model, const Matrix& z);

struct GridCell {
  std::size_t p = 0;
  double c = 1.0;
  std::optional<double> sigma;  // kernel svm bandwidth; linear when absent
  double mean_accuracy = 0.0;
};

struct CvGrid {
  std::vector<std::size_t> p_values;
  std::vector<double> c_values;
  std::vector<double> sigma_values;  // empty: linear svm
};

struct CvResult {
  GridCell best;
  std::vector<GridCell> table;  // grid order: p, then C, then sigma
};

/// Stratified k-fold search. Best: highest mean accuracy, then smaller p,
/// smaller C, smaller sigma. p values larger than z.cols() are clamped.
CvResult cross_validate(const Matrix& z, const std::vector<int>& y, const CvGrid& grid, std::size_t folds,
                        std::uint64_t seed, const SvmOptions& opts = {});

/// Fold id per sample; every class is spread round-robin over shuffled folds.
std::vector<std::size_t> stratified_folds(const std::vector<int>& y, std::size_t folds, std::uint64_t seed);

struct DomainScore {
  double overall_accuracy = 0.0;
  double kappa = 0.0;
  std::size_t count = 0;
};

struct EvalReport {
  double overall_accuracy = 0.0;
  double kappa = 0.0;
  std::vector<int> classes;                       // confusion row/col order
  std::vector<std::vector<std::size_t>> confusion;  // rows: truth, cols: prediction
  std::map<std::size_t, DomainScore> per_domain;
};

/// Cohen's kappa from a square confusion matrix.
double cohen_kappa(const std::vector<std::vector<std::size_t>>& confusion);

EvalReport evaluate(const std::vector<int>& predicted, const std::vector<int>& truth,
                    const std::vector<std::size_t>& domain_of);

}  // namespace manialign::classify
