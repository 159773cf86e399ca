#pragma once

// Log-det barrier solver for small semidefinite programs of the form
//
//   minimize    c_g . z_g + sum_b c_b . z_b
//   subject to  A z_g = b
//               S_i(z) = C_i + G_i(z_g) + z_{b(i)} >= 0      (Hermitian LMIs)
//
// where z_g is a "global" real vector and z_b are "local" blocks. Each LMI
// touches the global block through a dense real coefficient matrix (or the
// identity) and at most one local block through the identity. Local blocks are
// eliminated by Schur complement in every Newton step, so problems with many
// per-state slack matrices stay cheap.
//
// Hermitian n x n matrices are coordinatized by the orthonormal basis
// {E_ii} u {(E_ij + E_ji)/sqrt2} u {i(E_ij - E_ji)/sqrt2}, i < j, so that
// herm_to_vec(A) . herm_to_vec(B) = Tr(AB).

#include <functional>
#include <optional>
#include <vector>

#include "qcomp/qcore.hpp"

namespace qcomp::lmi {

using RealMatrix = Eigen::MatrixXd;

RealVector herm_to_vec(const Matrix& h);
Matrix vec_to_herm(const RealVector& v, Index n);
Matrix herm_basis(Index n, Index a);

/// Real matrix of a linear map Hermitian(in_n) -> Hermitian(out_n).
RealMatrix linear_map_matrix(Index in_n, Index out_n, const std::function<Matrix(const Matrix&)>& f);

struct Lmi {
  Index size = 0;
  Matrix constant;  // size x size, Hermitian
  enum class Global { none, identity, matrix } global = Global::none;
  RealMatrix global_coeff;  // size^2 x global_size when global == matrix
  int local = -1;           // local block index, identity coupling
};

struct Problem {
  Index global_size = 0;
  std::vector<Index> local_sizes;
  RealVector c_global;
  std::vector<RealVector> c_local;
  RealMatrix eq_a;  // rows x global_size (may have zero rows)
  RealVector eq_b;
  std::vector<Lmi> lmis;
};

struct Options {
  double gap_tol = 1e-9;  // stop when the barrier duality-gap bound falls below this
  double mu = 50.0;
  int max_newton = 600;
  int max_centering = 50;  // Newton steps per centering; round-off stalls the decrement near the end
  double newton_tol = 1e-9;  // on lambda^2 / 2
};

struct Result {
  RealVector z_global;
  std::vector<RealVector> z_local;
  std::vector<Matrix> duals;  // S_i^{-1} / t at the last centered point
  double objective = 0.0;
  double gap_bound = 0.0;  // theta / t
  double t = 0.0;
  bool converged = false;
  int newton_steps = 0;
};

/// The starting point must be strictly feasible: every S_i positive definite
/// and A z_g = b.
Result solve(const Problem& problem, RealVector z_global, std::vector<RealVector> z_local, const Options& opts);

/// S_i at a point.
Matrix lmi_value(const Lmi& lmi, const RealVector& z_global, const std::vector<RealVector>& z_local);

}  // namespace qcomp::lmi
