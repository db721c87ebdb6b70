#pragma once

// End-to-end evaluation protocol: stratified test split, labeled and
// unlabeled sampling, alignment, cross-validated classification in the
// latent (or raw) space, and scoring on the transfer domains.

#include "manialign/alignment.hpp"
#include "manialign/classify.hpp"
#include "manialign/dataset.hpp"
#include "manialign/synth.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace manialign::protocol {

enum class Method { NoAdaptation, HistogramMatching, Ssma, KemaLinear, KemaRbf, Kcca, TargetOracle };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

enum class TrainOn { Pooled, SourceOnly };

struct ExperimentConfig {
  alignment::FitConfig fit;                    // mode and kernels are set per method
  std::vector<std::size_t> labeled_per_class;  // per domain; the last entry repeats
  std::size_t unlabeled_per_domain = 100;
  double test_fraction = 0.5;
  std::size_t leading_domain = 0;
  TrainOn train_on = TrainOn::Pooled;
  classify::CvGrid grid;
  std::size_t folds = 3;
  /// Smallest p whose CV accuracy is within this margin of the best cell wins.
  double p_tolerance = 0.01;
  /// Operational SVM stopping rule for the many CV fits.
  classify::SvmOptions svm{1e-3, 2000, 0};
  bool standardize = true;
  std::size_t curve_max_dims = 20;
  std::size_t hm_bins = 256;
  double kcca_eps = 1e-3;
  std::vector<Method> methods;
  std::uint64_t seed = 0;

  void validate() const;
};

ExperimentConfig default_experiment(synth::Archetype a);
classify::CvGrid default_grid();

/// One repetition's data, split per domain.
struct TrialSplit {
  MultiDomainCollection train;  // labeled, unlabeled and tie rows; labels only on labeled rows
  MultiDomainCollection test;   // held-out rows with true labels
  MultiDomainCollection pool;   // all non-test, non-tie rows with true labels
};

/// Stratified test split and sampling. `truth` gives full labels per domain,
/// `hidden` marks domains whose labels may not be used for training.
TrialSplit make_split(const MultiDomainCollection& data, const std::vector<std::vector<int>>& truth,
                      const std::vector<bool>& hidden, const ExperimentConfig& cfg, std::uint64_t seed);

struct MethodResult {
  Method method = Method::KemaRbf;
  classify::EvalReport transfer;   // test rows of the non-leading domains
  classify::EvalReport all;        // test rows of every domain
  classify::GridCell chosen;
  std::vector<double> curve;       // transfer OA per latent dimension 1..len
};

struct TrialResult {
  std::vector<MethodResult> methods;
};

/// Parsimonious pick from a CV table: the smallest p having a cell within
/// `tolerance` of the best accuracy, and that p's best cell.
classify::GridCell pick_cell(const classify::CvResult& cv, double tolerance);

/// Classifier selection by CV on (z_train, y_train), then scoring on the test
/// rows. z matrices may carry more columns than any grid p.
MethodResult classify_and_score(const Matrix& z_train, const std::vector<int>& y_train, const Matrix& z_test,
                                const std::vector<int>& y_test, const std::vector<std::size_t>& test_domain,
                                std::size_t leading_domain, const classify::CvGrid& grid, std::size_t folds,
                                bool standardize, std::size_t curve_dims, std::uint64_t seed,
                                const classify::SvmOptions& svm = {}, double p_tolerance = 0.0);

/// Same, but (p, C) is chosen by accuracy on a labeled validation set from
/// the transfer domains instead of by CV on the training rows.
MethodResult classify_and_score_validated(const Matrix& z_train, const std::vector<int>& y_train,
                                          const Matrix& z_val, const std::vector<int>& y_val, const Matrix& z_test,
                                          const std::vector<int>& y_test, const std::vector<std::size_t>& test_domain,
                                          std::size_t leading_domain, const classify::CvGrid& grid,
                                          bool standardize, std::size_t curve_dims, std::uint64_t seed,
                                          const classify::SvmOptions& svm = {}, double p_tolerance = 0.0);

TrialResult run_trial(const TrialSplit& split, const ExperimentConfig& cfg, std::uint64_t seed);

struct MethodSummary {
  Method method = Method::KemaRbf;
  double mean_oa = 0.0;
  double std_oa = 0.0;
  double mean_kappa = 0.0;
  double std_kappa = 0.0;
  std::vector<double> curve_mean;
  std::vector<double> curve_std;
  std::vector<double> oa_per_rep;
};

struct ExperimentResult {
  std::vector<MethodSummary> methods;
  std::vector<TrialResult> trials;
  double seconds = 0.0;

  const MethodSummary& get(Method m) const;
};

/// Repetition r regenerates the data with seed spec.seed + r and splits it
/// with cfg.seed + r. Repetitions run in parallel; aggregation is in seed order.
ExperimentResult run_experiment(const synth::SynthSpec& spec, const ExperimentConfig& cfg, std::size_t reps);

/// Population mean and standard deviation.
void mean_std(const std::vector<double>& v, double& mean, double& sd);

}  // namespace manialign::protocol
