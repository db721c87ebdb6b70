#include "manialign/eigsolve.hpp"

#include "manialign/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace manialign::eigsolve {

namespace {

constexpr const char* kModule = "eigsolve";
constexpr double kResidualTol = 1e-6;
constexpr Index kOracleMaxOrder = 64;

void check_inputs(const SymMatrix& a, const SymMatrix& b) {
  if (a.order() != b.order()) {
    throw Error(ErrorKind::DimensionMismatch, kModule,
                "A has order " + std::to_string(a.order()) + " but B has order " +
                    std::to_string(b.order()));
  }
  if (!a.all_finite() || !b.all_finite()) {
    throw Error(ErrorKind::NonFinite, kModule, "input matrices contain NaN or Inf");
  }
}

void fix_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  Index arg = 0;
  double best = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best) {
      best = std::abs(v(i));
      arg = i;
    }
  }
  if (v(arg) < 0) v = -v;
}

Matrix shifted(const SymMatrix& b, double ridge) {
  Matrix bt = b.dense();
  bt.diagonal().array() += ridge;
  return bt;
}

// Full ascending spectrum of the Cholesky-reduced problem.
EigenSolution reduce_and_solve(const SymMatrix& a, const SymMatrix& b, double ridge) {
  check_inputs(a, b);
  if (ridge < 0 || !std::isfinite(ridge)) {
    throw Error(ErrorKind::BadConfig, kModule, "ridge must be finite and nonnegative");
  }
  const Index n = a.order();
  EigenSolution out;
  if (n == 0) return out;

  const Matrix bt = shifted(b, ridge);
  Eigen::LLT<Matrix> llt(bt);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularB, kModule, "B + ridge I is not positive definite");
  }
  const auto lower = llt.matrixL();
  // C = L^{-1} A L^{-T}
  Matrix c = lower.solve(a.dense());
  c = lower.solve(c.transpose()).transpose();
  const SymMatrix cs(c);

  Eigen::SelfAdjointEigenSolver<Matrix> es(cs.dense());
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, kModule, "symmetric eigensolver did not converge");
  }
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = llt.matrixU().solve(es.eigenvectors());
  return out;
}

void verify_and_normalize(const SymMatrix& a, const SymMatrix& b, double ridge, EigenSolution& sol) {
  const Matrix bt = shifted(b, ridge);
  const double bound = kResidualTol * a.dense().norm();
  for (Index j = 0; j < sol.eigenvectors.cols(); ++j) {
    auto v = sol.eigenvectors.col(j);
    fix_sign(v);
    const double lambda = sol.eigenvalues(j);
    const double residual = (a.dense() * v - lambda * (bt * v)).norm();
    if (!(residual <= bound)) {
      throw Error(ErrorKind::ConvergenceFailure, kModule,
                  "residual " + std::to_string(residual) + " exceeds bound " + std::to_string(bound) +
                      " for eigenpair " + std::to_string(j));
    }
  }
}

// Cyclic Jacobi rotations; returns eigenvalues (unsorted) and orthonormal vectors.
void jacobi(Matrix m, Vector& values, Matrix& vectors) {
  const Index n = m.rows();
  vectors = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    if (off <= 1e-30 * std::max(1.0, m.squaredNorm())) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (m(p, q) == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * cs;
        for (Index k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = cs * mkp - sn * mkq;
          m(k, q) = sn * mkp + cs * mkq;
        }
        for (Index k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = cs * mpk - sn * mqk;
          m(q, k) = sn * mpk + cs * mqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = vectors(k, p);
          const double vkq = vectors(k, q);
          vectors(k, p) = cs * vkp - sn * vkq;
          vectors(k, q) = sn * vkp + cs * vkq;
        }
      }
    }
  }
  values = m.diagonal();
}

}  // namespace

double null_threshold(const Vector& all_eigenvalues) {
  const double scale = all_eigenvalues.size() ? all_eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return 1e-9 * std::max(scale, 1.0);
}

double default_ridge(const SymMatrix& b) {
  if (b.order() == 0) return 0.0;
  return 1e-8 * std::abs(b.trace()) / static_cast<double>(b.order());
}

namespace {

EigenSolution select_smallest(const SymMatrix& a, const SymMatrix& b, std::size_t num_vectors,
                              std::optional<double> ridge, bool allow_fewer) {
  check_inputs(a, b);
  if (num_vectors > static_cast<std::size_t>(a.order())) {
    throw Error(ErrorKind::DimensionMismatch, kModule,
                "requested " + std::to_string(num_vectors) + " eigenpairs from an order-" +
                    std::to_string(a.order()) + " problem");
  }
  const double r = ridge.value_or(default_ridge(b));
  EigenSolution full = reduce_and_solve(a, b, r);

  const double thr = null_threshold(full.eigenvalues);
  std::vector<Index> keep;
  std::size_t null_count = 0;
  for (Index i = 0; i < full.eigenvalues.size(); ++i) {
    if (full.eigenvalues(i) < thr) {
      ++null_count;
    } else if (keep.size() < num_vectors) {
      keep.push_back(i);
    }
  }
  if (keep.size() < num_vectors && !allow_fewer) {
    throw Error(ErrorKind::RankDeficient, kModule,
                "only " + std::to_string(keep.size()) + " non-null eigenpairs available, " +
                    std::to_string(num_vectors) + " requested");
  }

  EigenSolution out;
  out.rank_deficiency_count = null_count;
  out.eigenvalues.resize(static_cast<Index>(keep.size()));
  out.eigenvectors.resize(a.order(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.eigenvalues(static_cast<Index>(j)) = full.eigenvalues(keep[j]);
    out.eigenvectors.col(static_cast<Index>(j)) = full.eigenvectors.col(keep[j]);
  }
  verify_and_normalize(a, b, r, out);
  return out;
}

}  // namespace

EigenSolution solve_gep(const SymMatrix& a, const SymMatrix& b, std::size_t num_vectors,
                        std::optional<double> ridge) {
  return select_smallest(a, b, num_vectors, ridge, false);
}

EigenSolution solve_gep_at_most(const SymMatrix& a, const SymMatrix& b, std::size_t max_vectors,
                                std::optional<double> ridge) {
  return select_smallest(a, b, std::min<std::size_t>(max_vectors, static_cast<std::size_t>(a.order())), ridge,
                         true);
}

EigenSolution solve_gep_full(const SymMatrix& a, const SymMatrix& b, std::optional<double> ridge) {
  const double r = ridge.value_or(default_ridge(b));
  EigenSolution out = reduce_and_solve(a, b, r);
  const double thr = null_threshold(out.eigenvalues);
  out.rank_deficiency_count = static_cast<std::size_t>((out.eigenvalues.array() < thr).count());
  verify_and_normalize(a, b, r, out);
  return out;
}

EigenSolution solve_gep_oracle(const SymMatrix& a, const SymMatrix& b, double ridge) {
  check_inputs(a, b);
  const Index n = a.order();
  if (n > kOracleMaxOrder) {
    throw Error(ErrorKind::DimensionMismatch, kModule, "oracle limited to order <= 64");
  }
  EigenSolution out;
  if (n == 0) return out;

  Vector bvals;
  Matrix bvecs;
  jacobi(shifted(b, ridge), bvals, bvecs);
  if (bvals.minCoeff() <= 0.0) {
    throw Error(ErrorKind::SingularB, kModule, "B + ridge I is not positive definite");
  }
  const Matrix inv_sqrt = bvecs * bvals.cwiseSqrt().cwiseInverse().asDiagonal() * bvecs.transpose();
  Matrix c = inv_sqrt * a.dense() * inv_sqrt;
  c = 0.5 * (c + c.transpose()).eval();

  Vector vals;
  Matrix vecs;
  jacobi(c, vals, vecs);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return vals(i) < vals(j); });

  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    out.eigenvalues(j) = vals(order[static_cast<std::size_t>(j)]);
    Vector v = inv_sqrt * vecs.col(order[static_cast<std::size_t>(j)]);
    fix_sign(v);
    out.eigenvectors.col(j) = v;
  }
  const double thr = null_threshold(out.eigenvalues);
  out.rank_deficiency_count = static_cast<std::size_t>((out.eigenvalues.array() < thr).count());
  return out;
}

}  // namespace manialign::eigsolve
