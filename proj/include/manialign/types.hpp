#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

namespace manialign {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense symmetric matrix. Construction averages the input with its
/// transpose, so entries(i,j) == entries(j,i) holds bit-for-bit afterwards.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index order) : m_(Matrix::Zero(order, order)) {}
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(Index order) { return SymMatrix(Matrix(Matrix::Identity(order, order))); }

  Index order() const noexcept { return m_.rows(); }
  const Matrix& dense() const noexcept { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  /// Adds w at (i,j) and (j,i) (once on the diagonal).
  void add_symmetric(Index i, Index j, double w);

  bool all_finite() const { return m_.allFinite(); }
  double trace() const { return m_.trace(); }

 private:
  Matrix m_;
};

}  // namespace manialign
