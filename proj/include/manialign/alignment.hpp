#pragma once

// Semi-supervised manifold alignment in primal (linear, d x d problem) and
// dual (kernel, n x n problem) form. Both minimize the ratio
//   tr(F' X (mu L_g + L_s) X' F) / tr(F' X L_d X' F)
// through one symmetric generalized eigenproblem and keep the smallest
// non-null eigenpairs.

#include "manialign/dataset.hpp"
#include "manialign/graphs.hpp"
#include "manialign/kernels.hpp"
#include "manialign/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace manialign::alignment {

enum class Mode { PrimalSsma, DualKema };
enum class MuPlacement { Geo, Sim };  // mu multiplies L_g (default) or L_s
enum class GraphSource { Auto, Labels, Ties };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);
std::string to_string(MuPlacement m);
MuPlacement mu_placement_from_string(const std::string& s);
std::string to_string(GraphSource g);
GraphSource graph_source_from_string(const std::string& s);

inline constexpr std::size_t kDefaultNeighbors = 9;
inline constexpr std::size_t kDefaultMaxDims = 50;

struct SolveOptions {
  MuPlacement mu_on = MuPlacement::Geo;
  bool scale_by_sqrt_lambda = true;
  std::optional<double> ridge;  // eigsolve default when absent
  /// Tikhonov term added to the dual numerator as reg * mean(diag(A)) * I.
  /// Zero keeps the plain kernelized problem, whose rank-deficient kernel
  /// directions then compete with the meaningful ones.
  double kernel_reg = 1e-4;
};

/// Provenance recorded with a fitted model.
struct FitMetadata {
  std::size_t k = 0;
  std::string graph_source;
  double ridge = 0.0;
  double kernel_reg = 1e-4;
  std::size_t rank_deficiency = 0;
  std::size_t sim_edges = 0;
  std::size_t dis_edges = 0;
  std::vector<int> ignored_tie_objects;
  std::string rbf_convention = "exp(-|x-y|^2/(2 sigma^2)), sigma = half median distance";
};

struct AlignmentModel {
  Mode mode = Mode::DualKema;
  double mu = 1.0;
  MuPlacement mu_on = MuPlacement::Geo;
  bool scale_by_sqrt_lambda = true;
  std::size_t p = 0;
  Vector eigenvalues;                              // length p, ascending
  std::vector<Matrix> projectors;                  // primal: d_m x p; dual: n_m x p
  std::vector<kernels::KernelSpec> kernel_specs;   // dual only
  std::vector<Matrix> stored_samples;              // dual only: training samples per domain
  std::vector<std::size_t> domain_dims;            // d_m
  FitMetadata metadata;

  std::size_t num_domains() const { return projectors.size(); }
};

struct LatentData {
  Matrix coordinates;  // n x p
  std::vector<std::size_t> domain_of;
  std::size_t p = 0;
};

/// Builds A = X (mu L_g + L_s) X^T, B = X L_d X^T and splits each eigenvector
/// into per-domain blocks by feature offset.
AlignmentModel fit_ssma(const MultiDomainCollection& data, const graphs::LaplacianTriple& lap,
                        std::optional<std::size_t> p, const SolveOptions& opts = {});

/// Builds A = K (mu L_g + L_s) K, B = K L_d K and splits each eigenvector into
/// per-domain dual coefficient blocks by sample offset.
AlignmentModel fit_kema(const MultiDomainCollection& data, const graphs::LaplacianTriple& lap,
                        const kernels::BlockKernel& kernel, std::optional<std::size_t> p,
                        const SolveOptions& opts = {});

/// Projects samples of domain `domain` into the first `p` latent dimensions
/// (all of them when absent).
LatentData transform(const AlignmentModel& model, std::size_t domain, const Matrix& x,
                     std::optional<std::size_t> p = std::nullopt);

/// Projects every domain of a collection, stacked in global sample order.
LatentData transform_all(const AlignmentModel& model, const MultiDomainCollection& data,
                         std::optional<std::size_t> p = std::nullopt);

struct FitConfig {
  Mode mode = Mode::DualKema;
  double mu = 1.0;
  std::size_t k = kDefaultNeighbors;
  /// One spec per domain, or a single spec applied to all. Empty: rbf half median.
  std::vector<kernels::KernelSpec> kernels;
  std::optional<std::size_t> p;
  GraphSource graph_source = GraphSource::Auto;
  double tie_dis_weight = 0.5;
  bool within_domain_pairs = true;
  SolveOptions solve;
  std::uint64_t seed = 0;
};

/// Graph construction shared by fit() and by tests that compose the pipeline by hand.
graphs::LaplacianTriple build_laplacians(const MultiDomainCollection& data, const FitConfig& config,
                                         FitMetadata* meta = nullptr);

std::vector<kernels::KernelSpec> resolve_kernels(const MultiDomainCollection& data, const FitConfig& config);

/// Full pipeline: k-NN graphs, label or tie graphs, Laplacians, kernels, solve.
AlignmentModel fit(const MultiDomainCollection& data, const FitConfig& config);

}  // namespace manialign::alignment
