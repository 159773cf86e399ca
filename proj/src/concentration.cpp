#include "qcomp/concentration.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "qcomp/parallel.hpp"

namespace qcomp {

void Lemma2Params::validate() const {
  if (m < 1 || p < 1 || d < 1 || l < 1) throw Error(ErrorKind::invalid_parameter, "lemma2: m, p, d and l must be positive");
  if (l > m) throw Error(ErrorKind::invalid_parameter, "lemma2: l must not exceed m");
  if (!(alpha > 2.0)) throw Error(ErrorKind::invalid_parameter, "lemma2: alpha must exceed 2");
  if (trials < 1) throw Error(ErrorKind::invalid_parameter, "lemma2: trials must be at least 1");
  if (d > m * p) throw Error(ErrorKind::invalid_parameter, "lemma2: d exceeds m * p");
}

Subspace random_subspace(std::size_t m, std::size_t l, RngSeed seed) {
  if (l > m) throw Error(ErrorKind::invalid_parameter, "random_subspace: l must not exceed m");
  return Subspace(haar_unitary(m, seed).leftCols(static_cast<Index>(l)));
}

SideCondition lemma2_condition(const Lemma2Params& prm) {
  prm.validate();
  const double m = static_cast<double>(prm.m);
  const double l = static_cast<double>(prm.l);
  const double a2 = (prm.alpha - 2.0) * (prm.alpha - 2.0);
  SideCondition c;
  c.lhs = a2 * l * l * (m - 2.0);
  c.rhs = 4.0 * 384.0 * static_cast<double>(prm.d) * m * m * std::log(8.0 * m / (prm.alpha * l));
  c.holds = c.lhs >= c.rhs;
  return c;
}

double lemma2_bound(const Lemma2Params& prm) {
  prm.validate();
  const double m = static_cast<double>(prm.m);
  const double l = static_cast<double>(prm.l);
  const double a2 = (prm.alpha - 2.0) * (prm.alpha - 2.0);
  return std::exp(-a2 * l * l * (m - 2.0) / (768.0 * m * m));
}

namespace {

// rows of (Z* (x) 1_p) W: the statistic is the squared top singular value.
double projected_statistic(const Matrix& z, std::size_t p, const Matrix& w_frame) {
  const Index m = z.rows();
  const Index l = z.cols();
  const auto pp = static_cast<Index>(p);
  const Index d = w_frame.cols();
  Matrix b = Matrix::Zero(l * pp, d);
  // (Z* (x) 1)[(r, s), (a, s)] = conj(Z[a, r])
  for (Index r = 0; r < l; ++r) {
    for (Index a = 0; a < m; ++a) {
      const Complex c = std::conj(z(a, r));
      for (Index s = 0; s < pp; ++s) b.row(r * pp + s) += c * w_frame.row(a * pp + s);
    }
  }
  return max_eigenvalue(hermitian_part(b.adjoint() * b));
}

}  // namespace

TailReport lemma2_experiment(const Lemma2Params& prm, const Subspace& w, std::size_t threads) {
  prm.validate();
  if (w.ambient_dim() != prm.m * prm.p || w.dim() != prm.d) {
    throw Error(ErrorKind::invalid_input, "lemma2_experiment: W must be a d-dimensional subspace of C^m (x) C^p");
  }
  TailReport r;
  r.threshold = prm.alpha * static_cast<double>(prm.l) / static_cast<double>(prm.m);
  r.theoretical_bound = lemma2_bound(prm);
  r.condition_holds = lemma2_condition(prm).holds;
  r.trials = prm.trials;
  r.records.resize(prm.trials);
  parallel_for(prm.trials, threads, [&](std::size_t t) {
    const Subspace z = random_subspace(prm.m, prm.l, RngSeed{prm.seed, t});
    const double stat = projected_statistic(z.frame(), prm.p, w.frame());
    r.records[t] = TrialRecord{t, stat, stat >= r.threshold};
  });
  double sum = 0.0;
  std::size_t hits = 0;
  for (const auto& rec : r.records) {
    sum += rec.statistic;
    hits += rec.exceeded ? 1 : 0;
  }
  const double n = static_cast<double>(prm.trials);
  r.mean_value = sum / n;
  r.empirical_tail = static_cast<double>(hits) / n;
  if (prm.trials > 1) {
    double ss = 0.0;
    for (const auto& rec : r.records) ss += (rec.statistic - r.mean_value) * (rec.statistic - r.mean_value);
    r.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return r;
}

Json to_json(const TailReport& r) {
  return Json{{"threshold", r.threshold},
              {"empirical_tail", r.empirical_tail},
              {"theoretical_bound", r.theoretical_bound},
              {"condition_holds", r.condition_holds},
              {"mean_value", r.mean_value},
              {"std_error", r.std_error},
              {"trials", r.trials}};
}

std::string to_csv(const TailReport& r, int precision) {
  std::string out = "trial,statistic,exceeded\n";
  char buf[64];
  for (const auto& rec : r.records) {
    std::snprintf(buf, sizeof buf, "%zu,%.*g,%d\n", rec.trial, precision, rec.statistic, rec.exceeded ? 1 : 0);
    out += buf;
  }
  return out;
}

double thm2_bound(std::size_t m, double kappa, double t) {
  if (!(kappa > 0.0)) throw Error(ErrorKind::invalid_parameter, "thm2_bound: kappa must be positive");
  if (!(t >= 0.0)) throw Error(ErrorKind::invalid_parameter, "thm2_bound: t must be nonnegative");
  return std::exp(-(static_cast<double>(m) - 2.0) * t * t / (24.0 * kappa * kappa));
}

double lipschitz_ratio(const Matrix& u, const Matrix& v, const Matrix& projector, const Vector& vec, std::size_t p) {
  const double dist = (u - v).norm();
  if (!(dist > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const Index m = u.rows();
  const auto pp = static_cast<Index>(p);
  // v as an m x p matrix: <v|(A (x) 1)|v> = Tr(V* A V)
  Matrix vm(m, pp);
  for (Index a = 0; a < m; ++a) {
    for (Index s = 0; s < pp; ++s) vm(a, s) = vec(a * pp + s);
  }
  auto f = [&](const Matrix& w) { return (vm.adjoint() * w * projector * w.adjoint() * vm).trace().real(); };
  return std::abs(f(u) - f(v)) / dist;
}

LipschitzProbe lipschitz_probe(std::size_t m, std::size_t p, const Subspace& w, std::size_t l, std::size_t pairs,
                               RngSeed seed, std::size_t threads) {
  if (l > m) throw Error(ErrorKind::invalid_parameter, "lipschitz_probe: l must not exceed m");
  if (w.ambient_dim() != m * p || w.dim() == 0) throw Error(ErrorKind::invalid_input, "lipschitz_probe: W must be a nonzero subspace of C^m (x) C^p");
  const auto mm = static_cast<Index>(m);
  Matrix proj = Matrix::Zero(mm, mm);
  for (Index i = 0; i < static_cast<Index>(l); ++i) proj(i, i) = 1.0;
  std::vector<double> ratios(pairs, std::numeric_limits<double>::quiet_NaN());
  parallel_for(pairs, threads, [&](std::size_t i) {
    Rng rng(RngSeed{seed.seed, seed.stream + i});
    const Matrix u = haar_unitary(m, rng);
    Matrix v;
    if (i % 2 == 0) {
      v = haar_unitary(m, rng);
    } else {
      const double s = std::pow(10.0, -3.0 * rng.uniform());
      const Matrix h = random_hermitian(m, rng);
      const auto eig = hermitian_eig(h);
      Vector phases(mm);
      for (Index k = 0; k < mm; ++k) phases(k) = std::polar(1.0, s * eig.values(k));
      v = u * eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
    }
    const Vector vec = w.frame() * random_unit_vector(w.dim(), rng);
    ratios[i] = lipschitz_ratio(u, v, proj, vec, p);
  });
  LipschitzProbe out;
  for (double r : ratios) {
    if (std::isnan(r)) continue;
    out.max_ratio = std::max(out.max_ratio, r);
    ++out.pairs_used;
  }
  return out;
}

}  // namespace qcomp
