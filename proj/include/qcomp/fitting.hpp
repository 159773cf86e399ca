#pragma once

// Weighted trace-norm fitting
//
//   minimize  sum_x w_x || target_x - L_x(X) ||_1   over X >= 0, A vec(X) = b
//
// solved exactly with the barrier engine through ||A||_1 = min{2 Tr P - Tr A :
// P >= 0, P >= A}, plus a first-order primal-dual method for channel fits too
// large for the exact solver.

#include <optional>
#include <vector>

#include "qcomp/lmi.hpp"

namespace qcomp {

struct TraceFitProblem {
  Index x_dim = 0;
  std::vector<Matrix> targets;
  std::vector<double> weights;
  /// Matrix of L_x in Hermitian coordinates; std::nullopt means the identity.
  std::vector<std::optional<lmi::RealMatrix>> maps;
  lmi::RealMatrix eq_a;
  RealVector eq_b;
  /// Strictly positive definite point satisfying the equality constraint.
  Matrix start;
};

struct TraceFitResult {
  Matrix x;
  double objective = 0.0;  // exact sum of weighted trace norms at x
  double gap_bound = 0.0;
  bool converged = false;
};

TraceFitResult fit_trace_norm(const TraceFitProblem& problem, const lmi::Options& opts);

/// Output of the channel with Choi matrix `choi` on x, as a function of the
/// Choi entries, in Hermitian coordinates: (out^2) x ((out*in)^2).
lmi::RealMatrix choi_action_matrix(const Matrix& x, std::size_t in_dim, std::size_t out_dim);

/// Constraint Tr_out J = 1 in Hermitian coordinates.
void choi_trace_constraint(std::size_t in_dim, std::size_t out_dim, lmi::RealMatrix& a, RealVector& b);

/// Nearest-looking valid Choi matrix: clamp to PSD, then rescale so that
/// Tr_out J = 1 exactly via J -> (1 (x) Q^{-1/2}) J (1 (x) Q^{-1/2}).
Matrix repair_choi(const Matrix& choi, std::size_t in_dim, std::size_t out_dim);

struct ChannelFitResult {
  Matrix choi;
  double objective = 0.0;
};

/// Chambolle-Pock on the saddle form of
///   min_J sum_x w_x ||targets_x - Psi_J(inputs_x)||_1,  J a Choi matrix,
/// started at `start`. Iterates are repaired and scored every few steps; the
/// best scored iterate is returned.
ChannelFitResult fit_channel_first_order(const std::vector<Matrix>& targets, const std::vector<double>& weights,
                                         const std::vector<Matrix>& inputs, std::size_t in_dim, std::size_t out_dim,
                                         const Matrix& start, int iterations);

}  // namespace qcomp
