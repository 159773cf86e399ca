#include "qcomp/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "qcomp/lmi.hpp"

namespace qcomp {

namespace {

double entropy_of_spectrum(const RealVector& values) {
  double s = 0.0;
  for (Index i = 0; i < values.size(); ++i) {
    const double l = values(i);
    if (l > 0.0) s -= l * std::log2(l);
  }
  return s;
}

double entropy_of_matrix(const Matrix& m) { return entropy_of_spectrum(hermitian_eig(hermitian_part(m)).values); }

struct Support {
  Matrix vectors;     // columns spanning supp sigma
  RealVector values;  // matching eigenvalues
  bool contains = false;  // supp rho within supp sigma
};

Support support_of(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw Error(ErrorKind::invalid_input, "entropy: dimension mismatch");
  const auto eig = hermitian_eig(sigma.matrix());
  const Index n = eig.values.size();
  const double top = std::max(eig.values(n - 1), 0.0);
  std::vector<Index> keep;
  for (Index i = 0; i < n; ++i) {
    if (top > 0.0 && eig.values(i) > kSupportCutoff * top) keep.push_back(i);
  }
  Support s;
  s.vectors.resize(n, static_cast<Index>(keep.size()));
  s.values.resize(static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    s.vectors.col(static_cast<Index>(c)) = eig.vectors.col(keep[c]);
    s.values(static_cast<Index>(c)) = eig.values(keep[c]);
  }
  const double inside = (s.vectors.adjoint() * rho.matrix() * s.vectors).trace().real();
  s.contains = rho.trace() - inside <= kSupportCutoff;
  return s;
}

}  // namespace

double von_neumann(const DensityOperator& rho) { return entropy_of_matrix(rho.matrix()); }

double min_entropy(const DensityOperator& rho) { return -std::log2(max_eigenvalue(rho.matrix())); }

double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
  const Support s = support_of(rho, sigma);
  if (!s.contains) return kInf;
  RealVector logs = s.values.array().log2();
  const Matrix proj = s.vectors.adjoint() * rho.matrix() * s.vectors;
  double cross = 0.0;
  for (Index i = 0; i < logs.size(); ++i) cross += proj(i, i).real() * logs(i);
  return -von_neumann(rho) - cross;
}

double max_relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
  const Support s = support_of(rho, sigma);
  if (!s.contains) return kInf;
  const RealVector inv_sqrt = s.values.array().rsqrt();
  const Matrix reduced = inv_sqrt.asDiagonal() * (s.vectors.adjoint() * rho.matrix() * s.vectors) * inv_sqrt.asDiagonal();
  return std::log2(max_eigenvalue(hermitian_part(reduced)));
}

// ---------------------------------------------------------------------------

CqState::CqState(std::vector<double> probs, std::vector<DensityOperator> states)
    : probs_(std::move(probs)), states_(std::move(states)) {
  if (probs_.empty() || probs_.size() != states_.size()) {
    throw Error(ErrorKind::invalid_input, "CqState: need one probability per state");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw Error(ErrorKind::invalid_input, "CqState: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) throw Error(ErrorKind::invalid_input, "CqState: probabilities do not sum to 1");
  for (const auto& s : states_) {
    if (s.dim() != states_.front().dim()) throw Error(ErrorKind::invalid_input, "CqState: states differ in dimension");
    if (!s.normalized()) throw Error(ErrorKind::invalid_input, "CqState: states must have unit trace");
  }
}

CqState CqState::uniform(std::vector<DensityOperator> states) {
  std::vector<double> p(states.size(), states.empty() ? 0.0 : 1.0 / static_cast<double>(states.size()));
  return CqState(std::move(p), std::move(states));
}

Matrix CqState::average() const {
  Matrix avg = Matrix::Zero(static_cast<Index>(dim()), static_cast<Index>(dim()));
  for (std::size_t x = 0; x < size(); ++x) avg += probs_[x] * states_[x].matrix();
  return avg;
}

Json to_json(const CqState& tau) {
  Json states = Json::array();
  for (const auto& s : tau.states()) states.push_back(matrix_to_json(s.matrix()));
  return Json{{"probs", tau.probs()}, {"states", states}};
}

CqState cq_state_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("probs") || !j.contains("states")) {
    throw Error(ErrorKind::parse_error, "cq state: expected object with 'probs' and 'states'");
  }
  std::vector<double> probs;
  std::vector<DensityOperator> states;
  try {
    probs = j.at("probs").get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::parse_error, "cq state: 'probs' must be an array of numbers");
  }
  const auto& arr = j.at("states");
  if (!arr.is_array()) throw Error(ErrorKind::parse_error, "cq state: 'states' must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Matrix m = matrix_from_json(arr[i], "states[" + std::to_string(i) + "]");
    try {
      states.push_back(DensityOperator::from_matrix(m));
    } catch (const Error& e) {
      throw Error(ErrorKind::validation_error, "states[" + std::to_string(i) + "]: " + e.what());
    }
  }
  try {
    return CqState(std::move(probs), std::move(states));
  } catch (const Error& e) {
    throw Error(ErrorKind::validation_error, e.what());
  }
}

double mutual_info_cq(const CqState& tau) {
  double s = entropy_of_matrix(tau.average());
  for (std::size_t x = 0; x < tau.size(); ++x) {
    if (tau.probs()[x] > 0.0) s -= tau.probs()[x] * von_neumann(tau.states()[x]);
  }
  return std::max(s, 0.0);
}

// ---------------------------------------------------------------------------
// Max-information

Json to_json(const ImaxCertificate& c) {
  Json duals = Json::array();
  for (const auto& y : c.dual_ops) duals.push_back(matrix_to_json(y));
  return Json{{"value", c.value}, {"gap", c.gap}, {"primal_sigma", matrix_to_json(c.primal_sigma)}, {"dual_ops", duals}};
}

ImaxCertificate imax_certificate_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::parse_error, "certificate: expected object");
  for (const char* key : {"value", "gap", "primal_sigma", "dual_ops"}) {
    if (!j.contains(key)) throw Error(ErrorKind::parse_error, std::string("certificate: missing '") + key + "'");
  }
  if (!j.at("value").is_number() || !j.at("gap").is_number() || !j.at("dual_ops").is_array()) {
    throw Error(ErrorKind::parse_error, "certificate: wrong field types");
  }
  ImaxCertificate c;
  c.value = j.at("value").get<double>();
  c.gap = j.at("gap").get<double>();
  c.primal_sigma = matrix_from_json(j.at("primal_sigma"), "primal_sigma");
  const auto& arr = j.at("dual_ops");
  for (std::size_t i = 0; i < arr.size(); ++i) c.dual_ops.push_back(matrix_from_json(arr[i], "dual_ops[" + std::to_string(i) + "]"));
  return c;
}

namespace {

double dual_value(const CqState& tau, const std::vector<Matrix>& ys) {
  double v = 0.0;
  for (std::size_t x = 0; x < tau.size(); ++x) v += (ys[x] * tau.states()[x].matrix()).trace().real();
  return v;
}

ImaxCertificate finish_certificate(const CqState& tau, Matrix sigma, std::vector<Matrix> ys) {
  for (auto& y : ys) y = hermitian_part(y);
  Matrix sum = Matrix::Zero(sigma.rows(), sigma.cols());
  for (const auto& y : ys) sum += y;
  const double top = max_eigenvalue(hermitian_part(sum));
  if (top > 1.0) {
    for (auto& y : ys) y /= top;
  }
  ImaxCertificate c;
  c.primal_sigma = hermitian_part(sigma);
  const double primal = std::log2(c.primal_sigma.trace().real());
  const double dual = std::log2(dual_value(tau, ys));
  c.dual_ops = std::move(ys);
  c.value = 0.5 * (primal + dual);
  c.gap = primal - dual;
  return c;
}

}  // namespace

ImaxCertificate imax_cq(const CqState& tau, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_parameter, "imax_cq: tol must be positive");
  const auto n = static_cast<Index>(tau.dim());
  std::vector<std::size_t> active;
  for (std::size_t x = 0; x < tau.size(); ++x) {
    if (tau.probs()[x] > 0.0) active.push_back(x);
  }

  // All active states equal: sigma' = rho and Y = 1 on one of them is optimal.
  const Matrix& first = tau.states()[active.front()].matrix();
  bool identical = true;
  for (std::size_t x : active) identical = identical && max_abs_diff(tau.states()[x].matrix(), first) <= 1e-12;
  if (identical) {
    std::vector<Matrix> ys(tau.size(), Matrix::Zero(n, n));
    ys[active.front()] = Matrix::Identity(n, n);
    return finish_certificate(tau, first, std::move(ys));
  }

  lmi::Problem prob;
  prob.global_size = n * n;
  prob.c_global = lmi::herm_to_vec(Matrix::Identity(n, n));
  for (std::size_t x : active) {
    lmi::Lmi l;
    l.size = n;
    l.constant = -tau.states()[x].matrix();
    l.global = lmi::Lmi::Global::identity;
    prob.lmis.push_back(std::move(l));
  }
  lmi::Options opts;
  // Tr sigma' >= 1, so an absolute gap g costs at most g / ln 2 bits.
  opts.gap_tol = 0.25 * tol;
  opts.max_newton = 2000;
  const auto res = lmi::solve(prob, lmi::herm_to_vec(2.0 * Matrix::Identity(n, n)), {}, opts);

  std::vector<Matrix> ys(tau.size(), Matrix::Zero(n, n));
  for (std::size_t i = 0; i < active.size(); ++i) ys[active[i]] = res.duals[i];
  ImaxCertificate c = finish_certificate(tau, lmi::vec_to_herm(res.z_global, n), std::move(ys));
  if (!(c.gap <= tol)) throw ImaxNotConverged(std::move(c));
  return c;
}

CertificateCheck verify_imax_certificate(const CqState& tau, const ImaxCertificate& cert, double tol) {
  constexpr double psd_tol = 1e-8;
  const auto n = static_cast<Index>(tau.dim());
  CertificateCheck chk;
  if (cert.primal_sigma.rows() != n || cert.primal_sigma.cols() != n || cert.dual_ops.size() != tau.size()) {
    return chk;
  }
  for (const auto& y : cert.dual_ops) {
    if (y.rows() != n || y.cols() != n) return chk;
  }
  if (!is_hermitian(cert.primal_sigma, psd_tol)) return chk;
  chk.min_primal_slack = kInf;
  chk.min_dual_eig = kInf;
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t x = 0; x < tau.size(); ++x) {
    if (tau.probs()[x] > 0.0) {
      chk.min_primal_slack = std::min(chk.min_primal_slack, min_eigenvalue(hermitian_part(cert.primal_sigma - tau.states()[x].matrix())));
    }
    if (!is_hermitian(cert.dual_ops[x], psd_tol)) return chk;
    chk.min_dual_eig = std::min(chk.min_dual_eig, min_eigenvalue(hermitian_part(cert.dual_ops[x])));
    sum += cert.dual_ops[x];
  }
  chk.min_sum_slack = min_eigenvalue(hermitian_part(Matrix::Identity(n, n) - sum));
  chk.primal_bits = std::log2(cert.primal_sigma.trace().real());
  chk.dual_bits = std::log2(dual_value(tau, cert.dual_ops));
  constexpr double order_slack = 1e-12;
  chk.passes = chk.min_primal_slack >= -psd_tol && chk.min_dual_eig >= -psd_tol && chk.min_sum_slack >= -psd_tol &&
               chk.dual_bits <= cert.value + order_slack && cert.value <= chk.primal_bits + order_slack &&
               chk.primal_bits - chk.dual_bits <= tol;
  return chk;
}

double smooth_imax_lb(std::size_t k, double zeta) {
  if (k < 1) throw Error(ErrorKind::invalid_parameter, "smooth_imax_lb: k must be at least 1");
  if (!(zeta >= 0.0 && zeta < 0.125)) throw Error(ErrorKind::invalid_parameter, "smooth_imax_lb: zeta must lie in [0, 1/8)");
  return std::log2(static_cast<double>(k)) - std::log2((3.0 - 12.0 * zeta) / (1.0 - 8.0 * zeta));
}

double cond_mi_product(const DensityOperator& tau_xm, std::size_t dim_x, std::size_t dim_m,
                       const DensityOperator& sigma_y) {
  if (tau_xm.dim() != dim_x * dim_m) throw Error(ErrorKind::invalid_input, "cond_mi_product: dims do not match tau_xm");
  const std::size_t dim_y = sigma_y.dim();
  const Matrix joint = tensor(tau_xm.matrix(), sigma_y.matrix());
  const std::array<std::size_t, 3> dims{dim_x, dim_m, dim_y};
  auto marginal = [&](std::initializer_list<std::size_t> traced) {
    const std::vector<std::size_t> t(traced);
    return entropy_of_matrix(partial_trace(joint, dims, t));
  };
  const double s_xmy = entropy_of_matrix(joint);
  const double s_x = marginal({1, 2});
  const double s_m = marginal({0, 2});
  const double s_y = marginal({0, 1});
  const double s_xm = marginal({2});
  const double s_xy = marginal({1});
  const double s_my = marginal({0});

  const double i_x_m = s_x + s_m - s_xm;
  const double i_xy_m = s_xy + s_m - s_xmy;
  const double i_x_m_given_y = s_xy + s_my - s_y - s_xmy;
  if (std::abs(i_x_m - i_xy_m) > 1e-8 || std::abs(i_x_m - i_x_m_given_y) > 1e-8) {
    throw Error(ErrorKind::validation_error, "cond_mi_product: joint state is not of product form");
  }
  return i_x_m;
}

}  // namespace qcomp
