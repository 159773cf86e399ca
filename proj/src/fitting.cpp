#include "qcomp/fitting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "qcomp/metrics.hpp"

namespace qcomp {

namespace {

double fit_objective(const TraceFitProblem& p, const Matrix& x) {
  const RealVector xv = lmi::herm_to_vec(x);
  double total = 0.0;
  for (std::size_t i = 0; i < p.targets.size(); ++i) {
    const Index out = p.targets[i].rows();
    const Matrix image = p.maps[i] ? lmi::vec_to_herm(*p.maps[i] * xv, out) : x;
    total += p.weights[i] * trace_norm(p.targets[i] - image);
  }
  return total;
}

}  // namespace

TraceFitResult fit_trace_norm(const TraceFitProblem& p, const lmi::Options& opts) {
  const std::size_t terms = p.targets.size();
  if (terms == 0 || p.weights.size() != terms || p.maps.size() != terms) {
    throw Error(ErrorKind::invalid_input, "fit_trace_norm: inconsistent problem");
  }
  const Index n = p.x_dim;
  const RealVector xv0 = lmi::herm_to_vec(p.start);

  lmi::Problem prob;
  prob.global_size = n * n;
  prob.c_global = RealVector::Zero(n * n);
  prob.eq_a = p.eq_a;
  prob.eq_b = p.eq_b;

  lmi::Lmi psd;
  psd.size = n;
  psd.constant = Matrix::Zero(n, n);
  psd.global = lmi::Lmi::Global::identity;
  prob.lmis.push_back(psd);

  std::vector<RealVector> z_local;
  for (std::size_t i = 0; i < terms; ++i) {
    const Index out = p.targets[i].rows();
    const RealVector id = lmi::herm_to_vec(Matrix::Identity(out, out));
    prob.local_sizes.push_back(out * out);
    prob.c_local.push_back(2.0 * p.weights[i] * id);
    // Tr L(X) enters the objective through -Tr(target - L(X)).
    if (p.maps[i]) prob.c_global.noalias() += p.weights[i] * p.maps[i]->transpose() * id;
    else prob.c_global += p.weights[i] * id;

    lmi::Lmi pos;
    pos.size = out;
    pos.constant = Matrix::Zero(out, out);
    pos.local = static_cast<int>(i);
    prob.lmis.push_back(pos);

    lmi::Lmi dom;
    dom.size = out;
    dom.constant = -p.targets[i];
    dom.local = static_cast<int>(i);
    if (p.maps[i]) {
      dom.global = lmi::Lmi::Global::matrix;
      dom.global_coeff = *p.maps[i];
    } else {
      dom.global = lmi::Lmi::Global::identity;
    }
    const Matrix image = p.maps[i] ? lmi::vec_to_herm(*p.maps[i] * xv0, out) : p.start;
    const Matrix diff = hermitian_part(p.targets[i] - image);
    const double scale = std::max(max_eigenvalue(diff), 0.0) + 1.0;
    z_local.push_back(lmi::herm_to_vec(scale * Matrix::Identity(out, out)));
    prob.lmis.push_back(std::move(dom));
  }

  const auto res = lmi::solve(prob, xv0, std::move(z_local), opts);
  TraceFitResult out;
  out.x = hermitian_part(lmi::vec_to_herm(res.z_global, n));
  out.objective = fit_objective(p, out.x);
  out.gap_bound = res.gap_bound;
  out.converged = res.converged;
  return out;
}

lmi::RealMatrix choi_action_matrix(const Matrix& x, std::size_t in_dim, std::size_t out_dim) {
  const auto big = static_cast<Index>(in_dim * out_dim);
  return lmi::linear_map_matrix(big, static_cast<Index>(out_dim),
                                [&](const Matrix& j) { return apply_choi(j, in_dim, out_dim, x); });
}

void choi_trace_constraint(std::size_t in_dim, std::size_t out_dim, lmi::RealMatrix& a, RealVector& b) {
  const std::array<std::size_t, 2> dims{out_dim, in_dim};
  a = lmi::linear_map_matrix(static_cast<Index>(in_dim * out_dim), static_cast<Index>(in_dim),
                             [&](const Matrix& j) { return partial_trace(j, dims, std::size_t{0}); });
  b = lmi::herm_to_vec(Matrix::Identity(static_cast<Index>(in_dim), static_cast<Index>(in_dim)));
}

Matrix repair_choi(const Matrix& choi, std::size_t in_dim, std::size_t out_dim) {
  const std::array<std::size_t, 2> dims{out_dim, in_dim};
  const auto in = static_cast<Index>(in_dim);
  const auto out = static_cast<Index>(out_dim);
  Matrix j = hermitian_function(hermitian_part(choi), [](double v) { return std::max(v, 0.0); });
  Matrix q = hermitian_part(partial_trace(j, dims, std::size_t{0}));
  if (min_eigenvalue(q) < 1e-8) {
    // Mix in the completely depolarizing channel so Q is invertible.
    j = 0.99 * j + 0.01 * Matrix::Identity(in * out, in * out) / static_cast<double>(out_dim);
    q = hermitian_part(partial_trace(j, dims, std::size_t{0}));
  }
  const Matrix q_inv_sqrt = hermitian_function(q, [](double v) { return 1.0 / std::sqrt(v); });
  const Matrix r = tensor(Matrix::Identity(out, out), q_inv_sqrt);
  return hermitian_part(r * j * r);
}

namespace {

Matrix clamp_spectrum(const Matrix& h, double lo, double hi) {
  return hermitian_function(hermitian_part(h), [=](double v) { return std::clamp(v, lo, hi); });
}

double channel_objective(const std::vector<Matrix>& targets, const std::vector<double>& weights,
                         const std::vector<Matrix>& inputs, std::size_t in_dim, std::size_t out_dim, const Matrix& j) {
  double total = 0.0;
  for (std::size_t x = 0; x < targets.size(); ++x) {
    total += weights[x] * trace_norm(targets[x] - apply_choi(j, in_dim, out_dim, inputs[x]));
  }
  return total;
}

}  // namespace

ChannelFitResult fit_channel_first_order(const std::vector<Matrix>& targets, const std::vector<double>& weights,
                                         const std::vector<Matrix>& inputs, std::size_t in_dim, std::size_t out_dim,
                                         const Matrix& start, int iterations) {
  const std::size_t terms = targets.size();
  const auto in = static_cast<Index>(in_dim);
  const auto out = static_cast<Index>(out_dim);
  const std::array<std::size_t, 2> dims{out_dim, in_dim};
  const Matrix id_in = Matrix::Identity(in, in);
  const Matrix id_out = Matrix::Identity(out, out);

  double a2 = 0.0;
  for (std::size_t x = 0; x < terms; ++x) a2 += weights[x] * weights[x] * inputs[x].squaredNorm();
  const double a = std::sqrt(std::max(a2, 1e-300));
  // The trace constraint is weighted by c so both parts of the operator
  // have comparable norm: ||K||^2 <= a^2 + c^2 out = 2 a^2.
  const double c = a / std::sqrt(static_cast<double>(out_dim));
  const double step = 0.99 / (a * std::sqrt(2.0));

  std::vector<Matrix> transposed(terms);
  for (std::size_t x = 0; x < terms; ++x) transposed[x] = inputs[x].transpose();

  Matrix j = start;
  std::vector<Matrix> duals(terms);
  for (std::size_t x = 0; x < terms; ++x) {
    duals[x] = hermitian_function(hermitian_part(targets[x] - apply_choi(j, in_dim, out_dim, inputs[x])),
                                  [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
  }
  Matrix lambda = Matrix::Zero(in, in);

  ChannelFitResult best{repair_choi(start, in_dim, out_dim), 0.0};
  best.objective = channel_objective(targets, weights, inputs, in_dim, out_dim, best.choi);

  for (int it = 1; it <= iterations; ++it) {
    Matrix grad = c * tensor(id_out, lambda);
    for (std::size_t x = 0; x < terms; ++x) grad -= weights[x] * tensor(duals[x], transposed[x]);
    const Matrix j_new = clamp_spectrum(j - step * grad, 0.0, std::numeric_limits<double>::infinity());
    const Matrix j_bar = 2.0 * j_new - j;
    j = j_new;
    for (std::size_t x = 0; x < terms; ++x) {
      const Matrix resid = targets[x] - apply_choi(j_bar, in_dim, out_dim, inputs[x]);
      duals[x] = clamp_spectrum(duals[x] + step * weights[x] * resid, -1.0, 1.0);
    }
    lambda += step * c * hermitian_part(partial_trace(j_bar, dims, std::size_t{0}) - id_in);

    if (it % 10 == 0 || it == iterations) {
      Matrix cand = repair_choi(j, in_dim, out_dim);
      const double obj = channel_objective(targets, weights, inputs, in_dim, out_dim, cand);
      if (obj < best.objective) best = {std::move(cand), obj};
    }
  }
  return best;
}

}  // namespace qcomp
