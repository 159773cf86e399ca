#include "qcomp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcomp {

namespace {

void require_same_dim(const DensityOperator& a, const DensityOperator& b, const char* op) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::invalid_input, std::string(op) + ": dimension mismatch");
}

}  // namespace

double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (m.rows() == m.cols() && is_hermitian(m, 1e-13 * scale)) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho, sigma, "trace_distance");
  return trace_norm(rho.matrix() - sigma.matrix());
}

double half_trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  return 0.5 * trace_distance(rho, sigma);
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho, sigma, "fidelity");
  // Eigenvalues below the round-off floor of a spectrum are set to zero
  // before square roots; left in, they contribute about 1e-8 each.
  const double floor_scale = 64.0 * static_cast<double>(rho.dim()) * std::numeric_limits<double>::epsilon();
  const auto er = hermitian_eig(rho.matrix());
  const double rho_floor = floor_scale * std::max(er.values.maxCoeff(), 0.0);
  RealVector roots(er.values.size());
  for (Index i = 0; i < roots.size(); ++i) roots(i) = er.values(i) > rho_floor ? std::sqrt(er.values(i)) : 0.0;
  const Matrix sqrt_rho = er.vectors * roots.cast<Complex>().asDiagonal() * er.vectors.adjoint();
  const Matrix inner = hermitian_part(sqrt_rho * sigma.matrix() * sqrt_rho);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(inner, Eigen::EigenvaluesOnly);
  const double inner_floor = floor_scale * std::max(solver.eigenvalues().maxCoeff(), 0.0);
  double f = 0.0;
  for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
    if (solver.eigenvalues()(i) > inner_floor) f += std::sqrt(solver.eigenvalues()(i));
  }
  const double defect = std::max(0.0, 1.0 - rho.trace()) * std::max(0.0, 1.0 - sigma.trace());
  f += std::sqrt(defect);
  return std::clamp(f, 0.0, 1.0);
}

double purified_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  const double f = fidelity(rho, sigma);
  return std::sqrt(std::max(0.0, 1.0 - f * f));
}

DistanceReport distance_report(const DensityOperator& rho, const DensityOperator& sigma) {
  DistanceReport r;
  r.trace_distance = trace_distance(rho, sigma);
  r.fidelity = fidelity(rho, sigma);
  r.purified_distance = std::sqrt(std::max(0.0, 1.0 - r.fidelity * r.fidelity));
  return r;
}

Json to_json(const DistanceReport& r) {
  return Json{{"trace_distance", r.trace_distance},
              {"fidelity", r.fidelity},
              {"purified_distance", r.purified_distance}};
}

HelstromResult helstrom(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho, sigma, "helstrom");
  const auto eig = hermitian_eig(rho.matrix() - sigma.matrix());
  const Index n = eig.values.size();
  Matrix proj = Matrix::Zero(n, n);
  double value = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double lam = eig.values(i);
    value += std::abs(lam);
    if (lam >= 0.0) proj.noalias() += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
  }
  return {value, proj};
}

FvdgSandwich fvdg_sandwich(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho, sigma, "fvdg_sandwich");
  FvdgSandwich s;
  const double p = purified_distance(rho, sigma);
  s.lower = 1.0 - std::sqrt(std::max(0.0, 1.0 - p * p));
  s.mid = half_trace_distance(rho, sigma);
  s.upper = p;
  s.holds = (s.mid - s.lower >= -1e-9) && (s.upper - s.mid >= -1e-9);
  return s;
}

}  // namespace qcomp
