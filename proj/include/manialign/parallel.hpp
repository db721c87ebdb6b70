#pragma once

// Data-parallel kernels shared by graphs, kernels, sampling and alignment.
//
// Every kernel has an OpenMP variant and a `_serial` reference. Each output
// element is produced by exactly one thread with a fixed reduction order, so
// results do not depend on the thread count. The elementwise kernels match
// their serial reference bit-for-bit; congruence() uses blocked products on
// fixed-width column tiles and matches its naive reference to rounding.

#include "manialign/types.hpp"

#include <cstddef>
#include <vector>

namespace manialign::parallel {

/// Reads MANIALIGN_THREADS and caps the OpenMP team size accordingly.
/// Returns the thread count that will be used.
int configure_threads_from_env();
int max_threads();

/// D(i,j) = ||a_i - b_j||^2, rows of a and b are samples.
Matrix squared_distances(const Matrix& a, const Matrix& b);
Matrix squared_distances_serial(const Matrix& a, const Matrix& b);

/// exp(-||a_i - b_j||^2 / (2 sigma^2)).
Matrix rbf_gram(const Matrix& a, const Matrix& b, double sigma);
Matrix rbf_gram_serial(const Matrix& a, const Matrix& b, double sigma);

/// a * b^T.
Matrix linear_gram(const Matrix& a, const Matrix& b);
Matrix linear_gram_serial(const Matrix& a, const Matrix& b);

/// Indices of the k nearest rows of x for every row (self excluded), ordered
/// by (distance, index).
std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& x, std::size_t k);
std::vector<std::vector<std::size_t>> nearest_neighbors_serial(const Matrix& x, std::size_t k);

/// left^T * middle * left, used for X L X^T and K L K. Symmetrized.
Matrix congruence(const Matrix& left, const Matrix& middle);
Matrix congruence_serial(const Matrix& left, const Matrix& middle);

}  // namespace manialign::parallel
