#pragma once

// Random-subspace projection tails and Lipschitz concentration on the
// unitary group, checked by Monte Carlo against their closed-form bounds.

#include <cstdint>
#include <string>
#include <vector>

#include "qcomp/nets.hpp"

namespace qcomp {

struct Lemma2Params {
  std::size_t m = 0;
  std::size_t p = 1;
  std::size_t d = 1;
  std::size_t l = 0;
  double alpha = 3.0;
  std::size_t trials = 1;
  std::uint64_t seed = 0;

  /// invalid-parameter on l > m, alpha <= 2, trials = 0 or zero sizes.
  void validate() const;
};

/// First l columns of a Haar unitary on C^m.
Subspace random_subspace(std::size_t m, std::size_t l, RngSeed seed);

struct SideCondition {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// (alpha - 2)^2 l^2 (m - 2) >= 1536 d m^2 ln(8m / (alpha l))
SideCondition lemma2_condition(const Lemma2Params& params);

/// exp(-(alpha - 2)^2 l^2 (m - 2) / (768 m^2))
double lemma2_bound(const Lemma2Params& params);

struct TrialRecord {
  std::size_t trial = 0;
  double statistic = 0.0;
  bool exceeded = false;
};

struct TailReport {
  double threshold = 0.0;  // alpha l / m
  double empirical_tail = 0.0;
  double theoretical_bound = 0.0;
  bool condition_holds = false;
  double mean_value = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::vector<TrialRecord> records;
};

/// Trial t draws Z on stream t of the seed and records ||M_Z (x) 1_p||_W,
/// computed exactly as the top eigenvalue of W*(M_Z (x) 1)W.
TailReport lemma2_experiment(const Lemma2Params& params, const Subspace& w, std::size_t threads = 1);

Json to_json(const TailReport& r);
/// Columns trial, statistic, exceeded.
std::string to_csv(const TailReport& r, int precision);

/// exp(-(m - 2) t^2 / (24 kappa^2))
double thm2_bound(std::size_t m, double kappa, double t);

/// |f(U) - f(V)| / ||U - V||_F with f(U) = <v|(U P U* (x) 1_p)|v>; NaN when
/// U = V.
double lipschitz_ratio(const Matrix& u, const Matrix& v, const Matrix& projector, const Vector& vec, std::size_t p);

struct LipschitzProbe {
  double max_ratio = 0.0;
  std::size_t pairs_used = 0;
};

/// Pair i uses stream i. Even pairs are independent Haar draws; odd pairs
/// perturb U by exp(i s H) with s log-uniform in [1e-3, 1], which probes the
/// local slope. P projects onto the first l coordinates and v is a random
/// unit vector of W.
LipschitzProbe lipschitz_probe(std::size_t m, std::size_t p, const Subspace& w, std::size_t l, std::size_t pairs,
                               RngSeed seed, std::size_t threads = 1);

}  // namespace qcomp
