#include "manialign/types.hpp"

#include "manialign/error.hpp"

namespace manialign {

SymMatrix::SymMatrix(const Matrix& m) : m_(m.rows(), m.cols()) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "eigsolve", "symmetric matrix must be square");
  }
  const Index n = m.rows();
  for (Index j = 0; j < n; ++j) {
    m_(j, j) = m(j, j);
    for (Index i = j + 1; i < n; ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
}

void SymMatrix::add_symmetric(Index i, Index j, double w) {
  m_(i, j) += w;
  if (i != j) m_(j, i) += w;
}

}  // namespace manialign
