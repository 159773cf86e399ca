#pragma once

// Finite epsilon-dense subsets of the unit sphere, the subspace semi-norm
// ||M||_A = max_{w in A, |w| = 1} |<w|M|w>|, and toy subspace nets built
// from spans of sphere-net points.

#include <vector>

#include "qcomp/qcore.hpp"
#include "qcomp/serialize.hpp"

namespace qcomp {

struct SphereNet {
  std::size_t dim = 0;
  double epsilon = 1.0;
  std::vector<PureState> points;
};

/// (4/eps)^{2 dim}
double sphere_net_bound(std::size_t dim, double epsilon);
/// (1 + 2/eps)^{2 dim}, the sharper volumetric count.
double sphere_net_refined_bound(std::size_t dim, double epsilon);

/// Randomized greedy net. Haar points are kept when farther than 0.75 eps
/// from every kept point; the search ends at `budget` points or after 1000
/// consecutive rejections (acceptance rate below 1e-3). A set with pairwise
/// separation s has at most (1 + 2/s)^{2 dim} points, which for s = 0.75 eps
/// stays under (4/eps)^{2 dim}. infeasible-scale if that bound exceeds budget.
SphereNet sphere_net(std::size_t dim, double epsilon, RngSeed seed, std::size_t budget);

struct CoveringCheck {
  double max_gap = 0.0;  // largest probe-to-net distance seen
  bool pass = false;     // max_gap <= epsilon
};

CoveringCheck check_covering(const SphereNet& net, std::size_t probes, RngSeed seed);

Json to_json(const SphereNet& net);

/// Largest |eigenvalue| of frame* M frame.
double seminorm(const Matrix& m, const Subspace& a);

struct SubspaceNet {
  std::size_t q = 0;  // ambient dimension
  std::size_t d = 0;  // dimension bound
  SphereNet base;
  std::vector<Subspace> members;
  std::vector<std::vector<std::size_t>> member_points;  // base indices spanning each member
};

/// Upper limit on the number of members subspace_net_build will materialize.
inline constexpr std::size_t kSubspaceNetCap = 200000;

/// Spans of every set of at most d base points, in lexicographic order of the
/// index sets. infeasible-scale above kSubspaceNetCap members.
SubspaceNet subspace_net_build(std::size_t q, std::size_t d, const SphereNet& base);

/// (8 sqrt(d) / delta)^{2 q d}
double subspace_net_bound(std::size_t q, std::size_t d, double delta);

/// Maps each vector of an orthonormal basis of A to its nearest base point and
/// returns the index of the member spanned by those points.
std::size_t snap_to_net(const SubspaceNet& net, const Subspace& a);

}  // namespace qcomp
