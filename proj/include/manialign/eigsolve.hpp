#pragma once

#include "manialign/types.hpp"

#include <cstddef>
#include <optional>

namespace manialign::eigsolve {

struct EigenSolution {
  Vector eigenvalues;         // ascending
  Matrix eigenvectors;        // column i pairs with eigenvalues(i), unit (B+ridge I)-norm
  std::size_t rank_deficiency_count = 0;  // eigenpairs below the null-space threshold
};

/// Eigenvalues below null_threshold(...) are treated as null-space directions.
double null_threshold(const Vector& all_eigenvalues);

/// Default ridge: 1e-8 * trace(B) / order.
double default_ridge(const SymMatrix& b);

/// Solves A v = lambda (B + ridge I) v by Cholesky reduction and returns the
/// num_vectors smallest eigenpairs that are not null-space directions.
/// Each eigenvector's largest-magnitude entry is made positive.
/// ridge == nullopt selects default_ridge(b).
EigenSolution solve_gep(const SymMatrix& a, const SymMatrix& b, std::size_t num_vectors,
                        std::optional<double> ridge = std::nullopt);

/// As solve_gep, but returns min(max_vectors, available non-null) pairs
/// instead of failing when fewer are available.
EigenSolution solve_gep_at_most(const SymMatrix& a, const SymMatrix& b, std::size_t max_vectors,
                                std::optional<double> ridge = std::nullopt);

/// Full spectrum of the same reduction, no null-space filtering. For
/// indefinite A (e.g. canonical correlation problems).
EigenSolution solve_gep_full(const SymMatrix& a, const SymMatrix& b,
                             std::optional<double> ridge = std::nullopt);

/// Test oracle: cyclic Jacobi on B^{-1/2} A B^{-1/2}, with B^{-1/2} itself from
/// a Jacobi decomposition of B + ridge I. Orders up to 64 only.
EigenSolution solve_gep_oracle(const SymMatrix& a, const SymMatrix& b, double ridge = 1e-9);

}  // namespace manialign::eigsolve
