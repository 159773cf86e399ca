#pragma once

// Reference computations used only by the tests. They follow the textbook
// definitions with explicit index loops or a different factorization than the
// library, so agreement is meaningful.

#include <Eigen/SVD>

#include "qcomp/qcore.hpp"

namespace oracle {

using qcomp::Complex;
using qcomp::Index;
using qcomp::Matrix;

inline double singular_sum(const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues().sum(); }

// Two-factor partial trace written as the defining double sum.
inline Matrix ptrace_second(const Matrix& m, Index da, Index db) {
  Matrix r = Matrix::Zero(da, da);
  for (Index i = 0; i < da; ++i)
    for (Index j = 0; j < da; ++j)
      for (Index b = 0; b < db; ++b) r(i, j) += m(i * db + b, j * db + b);
  return r;
}

inline Matrix ptrace_first(const Matrix& m, Index da, Index db) {
  Matrix r = Matrix::Zero(db, db);
  for (Index i = 0; i < db; ++i)
    for (Index j = 0; j < db; ++j)
      for (Index a = 0; a < da; ++a) r(i, j) += m(a * db + i, a * db + j);
  return r;
}

// Matrix square root of a PSD matrix through the Schur-free SVD route.
inline Matrix psd_sqrt(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.singularValues().cwiseSqrt().cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
}

// Uhlmann fidelity of normalized states, via the singular values of
// sqrt(rho) sqrt(sigma).
inline double fidelity(const Matrix& rho, const Matrix& sigma) { return singular_sum(psd_sqrt(rho) * psd_sqrt(sigma)); }

inline double entropy_bits(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  double s = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-14) s -= l * std::log2(l);
  }
  return s;
}

}  // namespace oracle
