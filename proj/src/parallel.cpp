#include "manialign/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

namespace manialign::parallel {

namespace {

inline double row_sqdist(const Matrix& a, Index i, const Matrix& b, Index j) {
  double s = 0.0;
  for (Index c = 0; c < a.cols(); ++c) {
    const double d = a(i, c) - b(j, c);
    s += d * d;
  }
  return s;
}

inline double row_dot(const Matrix& a, Index i, const Matrix& b, Index j) {
  double s = 0.0;
  for (Index c = 0; c < a.cols(); ++c) s += a(i, c) * b(j, c);
  return s;
}

std::vector<std::size_t> knn_row(const Matrix& x, Index i, std::size_t k) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::pair<double, std::size_t>> cand;
  cand.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (static_cast<Index>(j) == i) continue;
    cand.emplace_back(row_sqdist(x, i, x, static_cast<Index>(j)), j);
  }
  const std::size_t kk = std::min(k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk), cand.end());
  std::vector<std::size_t> out(kk);
  for (std::size_t t = 0; t < kk; ++t) out[t] = cand[t].second;
  return out;
}

constexpr Index kTile = 32;

}  // namespace

int configure_threads_from_env() {
  if (const char* env = std::getenv("MANIALIGN_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) omp_set_num_threads(n);
    } catch (...) {
      // ignored: falls back to the OpenMP default
    }
  }
  return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

Matrix squared_distances(const Matrix& a, const Matrix& b) {
  Matrix d(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.rows(); ++j) d(i, j) = row_sqdist(a, i, b, j);
  return d;
}

Matrix squared_distances_serial(const Matrix& a, const Matrix& b) {
  Matrix d(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.rows(); ++j) d(i, j) = row_sqdist(a, i, b, j);
  return d;
}

Matrix rbf_gram(const Matrix& a, const Matrix& b, double sigma) {
  const double scale = 1.0 / (2.0 * sigma * sigma);
  Matrix k(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.rows(); ++j) k(i, j) = std::exp(-row_sqdist(a, i, b, j) * scale);
  return k;
}

Matrix rbf_gram_serial(const Matrix& a, const Matrix& b, double sigma) {
  const double scale = 1.0 / (2.0 * sigma * sigma);
  Matrix k(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.rows(); ++j) k(i, j) = std::exp(-row_sqdist(a, i, b, j) * scale);
  return k;
}

Matrix linear_gram(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.rows(); ++j) k(i, j) = row_dot(a, i, b, j);
  return k;
}

Matrix linear_gram_serial(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.rows(); ++j) k(i, j) = row_dot(a, i, b, j);
  return k;
}

std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& x, std::size_t k) {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(x.rows()));
#pragma omp parallel for schedule(dynamic, 16)
  for (Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = knn_row(x, i, k);
  return out;
}

std::vector<std::vector<std::size_t>> nearest_neighbors_serial(const Matrix& x, std::size_t k) {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(x.rows()));
  for (Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = knn_row(x, i, k);
  return out;
}

Matrix congruence(const Matrix& left, const Matrix& middle) {
  const Index n = left.rows();
  const Index d = left.cols();
  Matrix t(n, d);
  const Index tiles = (d + kTile - 1) / kTile;
#pragma omp parallel for schedule(dynamic, 1)
  for (Index tile = 0; tile < tiles; ++tile) {
    const Index c0 = tile * kTile;
    const Index w = std::min(kTile, d - c0);
    t.middleCols(c0, w).noalias() = middle * left.middleCols(c0, w);
  }
  Matrix out(d, d);
#pragma omp parallel for schedule(dynamic, 1)
  for (Index tile = 0; tile < tiles; ++tile) {
    const Index c0 = tile * kTile;
    const Index w = std::min(kTile, d - c0);
    out.middleCols(c0, w).noalias() = left.transpose() * t.middleCols(c0, w);
  }
  return SymMatrix(out).dense();
}

Matrix congruence_serial(const Matrix& left, const Matrix& middle) {
  const Index n = left.rows();
  const Index d = left.cols();
  Matrix t = Matrix::Zero(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < d; ++c) {
      double s = 0.0;
      for (Index j = 0; j < n; ++j) s += middle(i, j) * left(j, c);
      t(i, c) = s;
    }
  Matrix out(d, d);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) {
      double s = 0.0;
      for (Index i = 0; i < n; ++i) s += left(i, a) * t(i, b);
      out(a, b) = s;
    }
  return SymMatrix(out).dense();
}

}  // namespace manialign::parallel
