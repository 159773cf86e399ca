#include "qcomp/lmi.hpp"

#include <cmath>
#include <limits>

namespace qcomp::lmi {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;
constexpr double kSqrt2 = 1.4142135623730951;

struct BasisEntry {
  Index i, j;
  int type;  // 0 diag, 1 real part, 2 imaginary part
};

std::vector<BasisEntry> basis_layout(Index n) {
  std::vector<BasisEntry> out;
  out.reserve(static_cast<std::size_t>(n * n));
  for (Index i = 0; i < n; ++i) out.push_back({i, i, 0});
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      out.push_back({i, j, 1});
      out.push_back({i, j, 2});
    }
  }
  return out;
}

// K_ab = Tr(E_a W E_b W), i.e. the matrix of E -> W E W in basis coordinates.
RealMatrix congruence_matrix(const Matrix& w, const std::vector<BasisEntry>& layout) {
  const Index n = w.rows();
  const auto dim = static_cast<Index>(layout.size());
  RealMatrix k(dim, dim);
  Matrix m(n, n);
  for (Index a = 0; a < dim; ++a) {
    const auto& e = layout[static_cast<std::size_t>(a)];
    const auto wi = w.col(e.i);
    const auto wj = w.col(e.j);
    if (e.type == 0) {
      m.noalias() = wi * wi.adjoint();
    } else if (e.type == 1) {
      m.noalias() = kInvSqrt2 * (wi * wj.adjoint() + wj * wi.adjoint());
    } else {
      m.noalias() = Complex(0.0, kInvSqrt2) * (wi * wj.adjoint() - wj * wi.adjoint());
    }
    for (Index b = 0; b < dim; ++b) {
      const auto& f = layout[static_cast<std::size_t>(b)];
      double v;
      if (f.type == 0) v = m(f.i, f.i).real();
      else if (f.type == 1) v = kSqrt2 * m(f.i, f.j).real();
      else v = kSqrt2 * m(f.i, f.j).imag();
      k(b, a) = v;
    }
  }
  return k;
}

struct Evaluation {
  bool feasible = false;
  double barrier = 0.0;  // -sum log det S_i
  std::vector<Matrix> inverses;
};

Evaluation evaluate(const Problem& p, const RealVector& zg, const std::vector<RealVector>& zl, bool want_inverses) {
  Evaluation ev;
  if (want_inverses) ev.inverses.reserve(p.lmis.size());
  for (const auto& lmi : p.lmis) {
    const Matrix s = lmi_value(lmi, zg, zl);
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) return ev;
    const auto diag = llt.matrixLLT().diagonal();
    double logdet = 0.0;
    for (Index i = 0; i < diag.size(); ++i) {
      const double d = diag(i).real();
      if (!(d > 0.0) || !std::isfinite(d)) return ev;
      logdet += 2.0 * std::log(d);
    }
    ev.barrier -= logdet;
    if (want_inverses) ev.inverses.push_back(llt.solve(Matrix::Identity(s.rows(), s.cols())));
  }
  ev.feasible = true;
  return ev;
}

double linear_objective(const Problem& p, const RealVector& zg, const std::vector<RealVector>& zl) {
  double v = p.c_global.size() ? p.c_global.dot(zg) : 0.0;
  for (std::size_t b = 0; b < zl.size(); ++b) {
    if (b < p.c_local.size() && p.c_local[b].size()) v += p.c_local[b].dot(zl[b]);
  }
  return v;
}

// Factorization of a symmetric positive definite matrix, regularized if
// round-off has destroyed definiteness.
struct SpdFactor {
  explicit SpdFactor(const RealMatrix& h) {
    llt.compute(h);
    if (llt.info() != Eigen::Success) {
      const double reg = 1e-12 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
      RealMatrix hr = h;
      hr.diagonal().array() += reg;
      llt.compute(hr);
      if (llt.info() != Eigen::Success) {
        use_ldlt = true;
        ldlt.compute(hr);
      }
    }
  }
  template <class M>
  RealMatrix solve(const M& b) const {
    return use_ldlt ? RealMatrix(ldlt.solve(b)) : RealMatrix(llt.solve(b));
  }
  Eigen::LLT<RealMatrix> llt;
  Eigen::LDLT<RealMatrix> ldlt;
  bool use_ldlt = false;
};

}  // namespace

RealVector herm_to_vec(const Matrix& h) {
  const Index n = h.rows();
  RealVector v(n * n);
  Index a = 0;
  for (Index i = 0; i < n; ++i) v(a++) = h(i, i).real();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const Complex z = 0.5 * (h(i, j) + std::conj(h(j, i)));
      v(a++) = kSqrt2 * z.real();
      v(a++) = kSqrt2 * z.imag();
    }
  }
  return v;
}

Matrix vec_to_herm(const RealVector& v, Index n) {
  if (v.size() != n * n) throw Error(ErrorKind::invalid_shape, "vec_to_herm: length mismatch");
  Matrix h(n, n);
  Index a = 0;
  for (Index i = 0; i < n; ++i) h(i, i) = v(a++);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double re = v(a++) * kInvSqrt2;
      const double im = v(a++) * kInvSqrt2;
      h(i, j) = Complex(re, im);
      h(j, i) = Complex(re, -im);
    }
  }
  return h;
}

Matrix herm_basis(Index n, Index a) {
  RealVector e = RealVector::Zero(n * n);
  e(a) = 1.0;
  return vec_to_herm(e, n);
}

RealMatrix linear_map_matrix(Index in_n, Index out_n, const std::function<Matrix(const Matrix&)>& f) {
  RealMatrix g(out_n * out_n, in_n * in_n);
  for (Index a = 0; a < in_n * in_n; ++a) g.col(a) = herm_to_vec(f(herm_basis(in_n, a)));
  return g;
}

Matrix lmi_value(const Lmi& lmi, const RealVector& z_global, const std::vector<RealVector>& z_local) {
  RealVector v = herm_to_vec(lmi.constant);
  switch (lmi.global) {
    case Lmi::Global::none: break;
    case Lmi::Global::identity: v += z_global; break;
    case Lmi::Global::matrix: v.noalias() += lmi.global_coeff * z_global; break;
  }
  if (lmi.local >= 0) v += z_local[static_cast<std::size_t>(lmi.local)];
  return vec_to_herm(v, lmi.size);
}

Result solve(const Problem& p, RealVector zg, std::vector<RealVector> zl, const Options& opts) {
  const Index n0 = p.global_size;
  const std::size_t nb = p.local_sizes.size();
  if (zg.size() != n0 || zl.size() != nb) throw Error(ErrorKind::invalid_shape, "lmi::solve: start point shape");
  const bool has_eq = p.eq_a.rows() > 0;

  double theta = 0.0;
  std::vector<std::vector<BasisEntry>> layouts;
  for (const auto& lmi : p.lmis) {
    theta += static_cast<double>(lmi.size);
    layouts.push_back(basis_layout(lmi.size));
  }

  Evaluation ev = evaluate(p, zg, zl, true);
  if (!ev.feasible) throw Error(ErrorKind::invalid_input, "lmi::solve: start point is not strictly feasible");

  Result res;
  double t = theta / (std::abs(linear_objective(p, zg, zl)) + 1.0);

  auto phi = [&](double tt, const RealVector& g, const std::vector<RealVector>& l, const Evaluation& e) {
    return tt * linear_objective(p, g, l) + e.barrier;
  };

  while (true) {
    // Centering by equality-constrained Newton.
    bool budget_hit = false;
    for (int inner = 0; inner < opts.max_centering; ++inner) {
      if (res.newton_steps >= opts.max_newton) {
        budget_hit = true;
        break;
      }
      ++res.newton_steps;

      RealVector g0 = t * (p.c_global.size() ? p.c_global : RealVector::Zero(n0));
      RealMatrix h00 = RealMatrix::Zero(n0, n0);
      std::vector<RealVector> gb(nb);
      std::vector<RealMatrix> hbb(nb), h0b(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        gb[b] = (b < p.c_local.size() && p.c_local[b].size()) ? RealVector(t * p.c_local[b])
                                                               : RealVector::Zero(p.local_sizes[b]);
        hbb[b] = RealMatrix::Zero(p.local_sizes[b], p.local_sizes[b]);
        h0b[b] = RealMatrix::Zero(n0, p.local_sizes[b]);
      }
      for (std::size_t i = 0; i < p.lmis.size(); ++i) {
        const auto& lmi = p.lmis[i];
        const Matrix& w = ev.inverses[i];
        const RealMatrix k = congruence_matrix(w, layouts[i]);
        const RealVector grad = -herm_to_vec(w);
        RealMatrix gk;
        switch (lmi.global) {
          case Lmi::Global::none: break;
          case Lmi::Global::identity:
            g0 += grad;
            h00 += k;
            break;
          case Lmi::Global::matrix:
            g0.noalias() += lmi.global_coeff.transpose() * grad;
            gk.noalias() = lmi.global_coeff.transpose() * k;
            h00.noalias() += gk * lmi.global_coeff;
            break;
        }
        if (lmi.local >= 0) {
          const auto b = static_cast<std::size_t>(lmi.local);
          gb[b] += grad;
          hbb[b] += k;
          if (lmi.global == Lmi::Global::identity) h0b[b] += k;
          else if (lmi.global == Lmi::Global::matrix) h0b[b] += gk;
        }
      }

      // Eliminate local blocks.
      RealMatrix hred = h00;
      RealVector gred = g0;
      std::vector<SpdFactor> fb;
      fb.reserve(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        fb.emplace_back(hbb[b]);
        const RealMatrix x = fb[b].solve(h0b[b].transpose());  // Hbb^{-1} Hb0
        hred.noalias() -= h0b[b] * x;
        gred.noalias() -= x.transpose() * gb[b];
      }
      RealVector d0 = RealVector::Zero(n0);
      if (n0 > 0) {
        hred = 0.5 * (hred + hred.transpose());
        SpdFactor fr(hred);
        if (has_eq) {
          const RealMatrix hinv_at = fr.solve(p.eq_a.transpose());
          const RealVector hinv_g = fr.solve(gred);
          RealMatrix schur = p.eq_a * hinv_at;
          schur = 0.5 * (schur + schur.transpose());
          const RealVector nu = SpdFactor(schur).solve(RealVector(-(p.eq_a * hinv_g)));
          d0 = -(hinv_g + hinv_at * nu);
        } else {
          d0 = -fr.solve(gred);
        }
      }
      std::vector<RealVector> db(nb);
      for (std::size_t b = 0; b < nb; ++b) db[b] = -fb[b].solve(RealVector(gb[b] + h0b[b].transpose() * d0));

      double slope = g0.dot(d0);
      for (std::size_t b = 0; b < nb; ++b) slope += gb[b].dot(db[b]);
      const double lambda2 = -slope;
      if (!(lambda2 > 0.0) || lambda2 / 2.0 <= opts.newton_tol) break;

      // Backtracking: stay strictly feasible, then sufficient decrease.
      const double phi0 = phi(t, zg, zl, ev);
      double s = 1.0;
      bool moved = false;
      while (s > 1e-14) {
        RealVector zg_new = zg + s * d0;
        std::vector<RealVector> zl_new(nb);
        for (std::size_t b = 0; b < nb; ++b) zl_new[b] = zl[b] + s * db[b];
        Evaluation ev_new = evaluate(p, zg_new, zl_new, false);
        if (ev_new.feasible && phi(t, zg_new, zl_new, ev_new) <= phi0 + 0.25 * s * slope) {
          zg = std::move(zg_new);
          zl = std::move(zl_new);
          moved = true;
          break;
        }
        s *= 0.5;
      }
      ev = evaluate(p, zg, zl, true);
      if (!moved) break;  // numerically stalled; treat as centered
    }
    res.gap_bound = theta / t;
    res.t = t;
    if (budget_hit) break;
    if (res.gap_bound <= opts.gap_tol) {
      res.converged = true;
      break;
    }
    t *= opts.mu;
  }

  res.duals.reserve(ev.inverses.size());
  for (const auto& w : ev.inverses) res.duals.push_back(w / t);
  res.objective = linear_objective(p, zg, zl);
  res.z_global = std::move(zg);
  res.z_local = std::move(zl);
  return res;
}

}  // namespace qcomp::lmi
