#pragma once

// Entropies (all in bits) and the max-information of classical-quantum states.

#include <limits>
#include <vector>

#include "qcomp/qcore.hpp"
#include "qcomp/serialize.hpp"

namespace qcomp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Eigenvalue cutoff (relative to the largest) deciding support inclusion.
inline constexpr double kSupportCutoff = 1e-10;

double von_neumann(const DensityOperator& rho);
double min_entropy(const DensityOperator& rho);
/// +inf when supp rho is not contained in supp sigma.
double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);
double max_relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);

/// Classical-quantum state sum_x p_x |x><x| (x) rho_x.
class CqState {
 public:
  CqState(std::vector<double> probs, std::vector<DensityOperator> states);
  static CqState uniform(std::vector<DensityOperator> states);

  std::size_t size() const { return probs_.size(); }
  std::size_t dim() const { return states_.front().dim(); }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<DensityOperator>& states() const { return states_; }
  Matrix average() const;

 private:
  std::vector<double> probs_;
  std::vector<DensityOperator> states_;
};

Json to_json(const CqState& tau);
CqState cq_state_from_json(const Json& j);

/// Holevo quantity sum_x p_x S(rho_x || rho_bar).
double mutual_info_cq(const CqState& tau);

struct ImaxCertificate {
  double value = 0.0;  // bits
  Matrix primal_sigma;  // dominates every rho_x with p_x > 0
  std::vector<Matrix> dual_ops;  // one per state, PSD, summing to at most 1
  double gap = 0.0;  // log2 Tr sigma' - log2 sum_x Tr(Y_x rho_x)
};

Json to_json(const ImaxCertificate& c);
ImaxCertificate imax_certificate_from_json(const Json& j);

/// Raised when the solver runs out of budget; carries the best pair found.
class ImaxNotConverged : public Error {
 public:
  explicit ImaxNotConverged(ImaxCertificate best)
      : Error(ErrorKind::convergence_failure, "imax_cq: duality gap above tolerance"), best_(std::move(best)) {}
  const ImaxCertificate& best() const { return best_; }

 private:
  ImaxCertificate best_;
};

/// log2 min{Tr s : s >= rho_x for all x with p_x > 0}, with a primal/dual
/// certificate whose gap is at most tol.
ImaxCertificate imax_cq(const CqState& tau, double tol);

struct CertificateCheck {
  double primal_bits = 0.0;  // log2 Tr sigma'
  double dual_bits = 0.0;    // log2 sum_x Tr(Y_x rho_x)
  double min_primal_slack = 0.0;  // min_x lambda_min(sigma' - rho_x)
  double min_dual_eig = 0.0;      // min_x lambda_min(Y_x)
  double min_sum_slack = 0.0;     // lambda_min(1 - sum_x Y_x)
  bool passes = false;
};

/// Independent verification at PSD tolerance 1e-8. Passing requires
/// dual_bits <= value <= primal_bits (within 1e-12) and primal - dual <= tol.
CertificateCheck verify_imax_certificate(const CqState& tau, const ImaxCertificate& cert, double tol);

/// Closed-form lower bound log2 k - log2((3 - 12 zeta)/(1 - 8 zeta)) on the
/// zeta-smoothed max-information of the uniform block ensembles. zeta in [0, 1/8).
double smooth_imax_lb(std::size_t k, double zeta);

/// For a joint state tau_XM (x) sigma_Y, evaluates I(X:M), I(XY:M) and
/// I(X:M|Y); they must agree to 1e-8 (validation-error otherwise).
double cond_mi_product(const DensityOperator& tau_xm, std::size_t dim_x, std::size_t dim_m,
                       const DensityOperator& sigma_y);

}  // namespace qcomp
