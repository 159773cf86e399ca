#include "qcomp/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace qcomp {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 6.283185307179586 * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::invalid_shape, "max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

EigenDecomposition hermitian_eig(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::invalid_input, "hermitian_eig: matrix not square");
  const double scale = m.size() == 0 ? 1.0 : std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!is_hermitian(m, 1e-8 * scale)) {
    throw Error(ErrorKind::invalid_input, "hermitian_eig: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::convergence_failure, "hermitian_eig: eigensolver failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double min_eigenvalue(const Matrix& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(hermitian), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double max_eigenvalue(const Matrix& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(hermitian), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

Matrix tensor(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Vector tensor(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

namespace {

std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

// Full-space offsets contributed by every multi-index over the chosen factors.
std::vector<std::size_t> offsets_for(std::span<const std::size_t> dims, const std::vector<bool>& chosen) {
  const std::size_t n = dims.size();
  std::vector<std::size_t> strides(n, 1);
  for (std::size_t i = n; i-- > 1;) strides[i - 1] = strides[i] * dims[i];
  std::vector<std::size_t> out{0};
  for (std::size_t f = 0; f < n; ++f) {
    if (!chosen[f]) continue;
    std::vector<std::size_t> next;
    next.reserve(out.size() * dims[f]);
    for (std::size_t base : out) {
      for (std::size_t k = 0; k < dims[f]; ++k) next.push_back(base + k * strides[f]);
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims, std::span<const std::size_t> traced) {
  const std::size_t total = product(dims);
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total) {
    throw Error(ErrorKind::invalid_shape, "partial_trace: product of dims (" + std::to_string(total) +
                                              ") does not match matrix dimension");
  }
  std::vector<bool> is_traced(dims.size(), false);
  for (std::size_t t : traced) {
    if (t >= dims.size()) throw Error(ErrorKind::invalid_shape, "partial_trace: traced index out of range");
    is_traced[t] = true;
  }
  std::vector<bool> is_kept(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) is_kept[i] = !is_traced[i];

  const auto keep = offsets_for(dims, is_kept);
  const auto trc = offsets_for(dims, is_traced);
  const auto nk = static_cast<Index>(keep.size());
  Matrix out = Matrix::Zero(nk, nk);
  for (Index a = 0; a < nk; ++a) {
    for (Index b = 0; b < nk; ++b) {
      Complex acc = 0.0;
      for (std::size_t t : trc) acc += m(static_cast<Index>(keep[a] + t), static_cast<Index>(keep[b] + t));
      out(a, b) = acc;
    }
  }
  return out;
}

Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims, std::size_t traced_index) {
  const std::size_t traced[] = {traced_index};
  return partial_trace(m, dims, std::span<const std::size_t>(traced));
}

Matrix haar_unitary(std::size_t dim, Rng& rng) {
  if (dim == 0) throw Error(ErrorKind::invalid_dimension, "haar_unitary: dim must be positive");
  const auto n = static_cast<Index>(dim);
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0 ? d / a : Complex(1.0));
  }
  return q;
}

Matrix haar_unitary(std::size_t dim, RngSeed seed) {
  Rng rng(seed);
  return haar_unitary(dim, rng);
}

Vector random_unit_vector(std::size_t dim, Rng& rng) {
  if (dim == 0) throw Error(ErrorKind::invalid_dimension, "random_unit_vector: dim must be positive");
  Vector v(static_cast<Index>(dim));
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

Matrix random_density_matrix(std::size_t dim, std::size_t rank, Rng& rng) {
  if (dim == 0 || rank == 0) throw Error(ErrorKind::invalid_dimension, "random_density_matrix: zero size");
  Matrix g(static_cast<Index>(dim), static_cast<Index>(rank));
  for (Index i = 0; i < g.rows(); ++i) {
    for (Index j = 0; j < g.cols(); ++j) g(i, j) = rng.complex_normal();
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitian_part(rho);
}

Matrix random_hermitian(std::size_t dim, Rng& rng) {
  Matrix g(static_cast<Index>(dim), static_cast<Index>(dim));
  for (Index i = 0; i < g.rows(); ++i) {
    for (Index j = 0; j < g.cols(); ++j) g(i, j) = rng.complex_normal();
  }
  return hermitian_part(g);
}

// ---------------------------------------------------------------------------

DensityOperator::DensityOperator(Matrix m) : m_(std::move(m)) {
  normalized_ = std::abs(trace() - 1.0) <= kStateTol;
}

DensityOperator DensityOperator::from_matrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::invalid_input, "density operator must be a nonempty square matrix");
  }
  if (!m.allFinite()) throw Error(ErrorKind::invalid_input, "density operator has non-finite entries");
  if (!is_hermitian(m, kStateTol)) throw Error(ErrorKind::invalid_input, "density operator is not Hermitian");
  Matrix h = hermitian_part(m);
  const double lmin = min_eigenvalue(h);
  if (lmin < -kStateTol) {
    throw Error(ErrorKind::invalid_input, "density operator has negative eigenvalue " + std::to_string(lmin));
  }
  const double tr = h.trace().real();
  if (tr < -kStateTol || tr > 1.0 + kStateTol) {
    throw Error(ErrorKind::invalid_input, "density operator trace " + std::to_string(tr) + " outside [0, 1]");
  }
  return DensityOperator(std::move(h));
}

DensityOperator DensityOperator::pure(const Vector& amplitudes) {
  if (amplitudes.size() == 0) throw Error(ErrorKind::invalid_input, "empty state vector");
  return from_matrix(amplitudes * amplitudes.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(std::size_t dim) {
  if (dim == 0) throw Error(ErrorKind::invalid_dimension, "maximally_mixed: dim must be positive");
  const auto n = static_cast<Index>(dim);
  return DensityOperator(Matrix::Identity(n, n) / static_cast<double>(dim));
}

DensityOperator DensityOperator::zero(std::size_t dim) {
  if (dim == 0) throw Error(ErrorKind::invalid_dimension, "zero: dim must be positive");
  const auto n = static_cast<Index>(dim);
  return DensityOperator(Matrix::Zero(n, n));
}

PureState PureState::from_amplitudes(const Vector& amplitudes) {
  if (amplitudes.size() == 0) throw Error(ErrorKind::invalid_input, "empty state vector");
  if (std::abs(amplitudes.norm() - 1.0) > 1e-12) {
    throw Error(ErrorKind::invalid_input, "pure state is not normalized");
  }
  return PureState(amplitudes);
}

PureState PureState::normalize(const Vector& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw Error(ErrorKind::invalid_input, "cannot normalize the zero vector");
  return PureState(v / n);
}

Subspace::Subspace(Matrix frame) : frame_(std::move(frame)) {
  if (frame_.cols() > frame_.rows()) {
    throw Error(ErrorKind::invalid_input, "subspace dimension exceeds ambient dimension");
  }
  const Matrix gram = frame_.adjoint() * frame_;
  if (gram.size() > 0 && max_abs_diff(gram, Matrix::Identity(gram.rows(), gram.cols())) > kStateTol) {
    throw Error(ErrorKind::invalid_input, "subspace frame is not orthonormal");
  }
}

Subspace Subspace::span(const Matrix& vectors) {
  if (vectors.cols() == 0) return Subspace(Matrix(vectors.rows(), 0));
  Eigen::JacobiSVD<Matrix> svd(vectors, Eigen::ComputeThinU);
  const RealVector& s = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return Subspace(svd.matrixU().leftCols(rank));
}

Subspace Subspace::canonical(std::size_t ambient_dim, std::size_t dim) {
  if (dim > ambient_dim) throw Error(ErrorKind::invalid_parameter, "canonical subspace larger than ambient space");
  return Subspace(Matrix::Identity(static_cast<Index>(ambient_dim), static_cast<Index>(dim)));
}

// ---------------------------------------------------------------------------

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kraus: return "kraus";
    case ChannelKind::choi: return "choi";
    case ChannelKind::stinespring: return "stinespring";
  }
  return "unknown";
}

ChannelKind channel_kind_from_string(std::string_view name) {
  if (name == "kraus") return ChannelKind::kraus;
  if (name == "choi") return ChannelKind::choi;
  if (name == "stinespring") return ChannelKind::stinespring;
  throw Error(ErrorKind::invalid_input, "unknown channel representation '" + std::string(name) + "'");
}

namespace {

Matrix kraus_completeness(const std::vector<Matrix>& ops) {
  Matrix acc = Matrix::Zero(ops.front().cols(), ops.front().cols());
  for (const auto& k : ops) acc.noalias() += k.adjoint() * k;
  return acc;
}

std::vector<Matrix> kraus_from_stinespring(const Matrix& v, std::size_t env) {
  const auto e = static_cast<Index>(env);
  const Index out = v.rows() / e;
  std::vector<Matrix> ops(env, Matrix::Zero(out, v.cols()));
  for (Index o = 0; o < out; ++o) {
    for (Index k = 0; k < e; ++k) ops[static_cast<std::size_t>(k)].row(o) = v.row(o * e + k);
  }
  return ops;
}

Matrix stinespring_from_kraus(const std::vector<Matrix>& ops) {
  const auto e = static_cast<Index>(ops.size());
  const Index out = ops.front().rows();
  Matrix v(out * e, ops.front().cols());
  for (Index o = 0; o < out; ++o) {
    for (Index k = 0; k < e; ++k) v.row(o * e + k) = ops[static_cast<std::size_t>(k)].row(o);
  }
  return v;
}

Matrix choi_from_kraus(const std::vector<Matrix>& ops) {
  const Index out = ops.front().rows();
  const Index in = ops.front().cols();
  Matrix j = Matrix::Zero(out * in, out * in);
  for (const auto& k : ops) {
    Vector v(out * in);
    for (Index a = 0; a < out; ++a) {
      for (Index i = 0; i < in; ++i) v(a * in + i) = k(a, i);
    }
    j.noalias() += v * v.adjoint();
  }
  return j;
}

std::vector<Matrix> kraus_from_choi(const Matrix& choi, Index in, Index out) {
  const auto eig = hermitian_eig(choi);
  const double top = std::max(eig.values.maxCoeff(), 0.0);
  std::vector<Matrix> ops;
  for (Index c = eig.values.size(); c-- > 0;) {
    const double lam = eig.values(c);
    if (!(lam > 1e-15 * top)) continue;
    Matrix k(out, in);
    const double s = std::sqrt(lam);
    for (Index a = 0; a < out; ++a) {
      for (Index i = 0; i < in; ++i) k(a, i) = s * eig.vectors(a * in + i, c);
    }
    ops.push_back(std::move(k));
  }
  if (ops.empty()) ops.push_back(Matrix::Zero(out, in));
  return ops;
}

}  // namespace

ChannelRep ChannelRep::from_kraus(std::vector<Matrix> ops) {
  if (ops.empty()) throw Error(ErrorKind::invalid_input, "Kraus list is empty");
  const Index out = ops.front().rows();
  const Index in = ops.front().cols();
  if (out == 0 || in == 0) throw Error(ErrorKind::invalid_input, "Kraus operators have zero size");
  for (const auto& k : ops) {
    if (k.rows() != out || k.cols() != in) throw Error(ErrorKind::invalid_input, "Kraus operators differ in shape");
  }
  if (max_abs_diff(kraus_completeness(ops), Matrix::Identity(in, in)) > kChannelTol) {
    throw Error(ErrorKind::invalid_input, "Kraus operators violate completeness");
  }
  return ChannelRep(KrausBody{std::move(ops)}, static_cast<std::size_t>(in), static_cast<std::size_t>(out));
}

ChannelRep ChannelRep::from_choi(Matrix choi, std::size_t in_dim, std::size_t out_dim) {
  const auto n = static_cast<Index>(in_dim * out_dim);
  if (in_dim == 0 || out_dim == 0 || choi.rows() != n || choi.cols() != n) {
    throw Error(ErrorKind::invalid_input, "Choi matrix has the wrong shape");
  }
  if (!is_hermitian(choi, kChannelTol)) throw Error(ErrorKind::invalid_input, "Choi matrix is not Hermitian");
  choi = hermitian_part(choi);
  if (min_eigenvalue(choi) < -kChannelTol) throw Error(ErrorKind::invalid_input, "Choi matrix is not PSD");
  const std::size_t dims[] = {out_dim, in_dim};
  const Matrix tr_out = partial_trace(choi, dims, 0);
  if (max_abs_diff(tr_out, Matrix::Identity(tr_out.rows(), tr_out.cols())) > kChannelTol) {
    throw Error(ErrorKind::invalid_input, "Choi matrix is not trace preserving");
  }
  return ChannelRep(ChoiBody{std::move(choi)}, in_dim, out_dim);
}

ChannelRep ChannelRep::from_stinespring(Matrix isometry, std::size_t env_dim) {
  if (env_dim == 0 || isometry.cols() == 0 || isometry.rows() % static_cast<Index>(env_dim) != 0) {
    throw Error(ErrorKind::invalid_input, "Stinespring isometry rows must be a multiple of env_dim");
  }
  const Matrix gram = isometry.adjoint() * isometry;
  if (max_abs_diff(gram, Matrix::Identity(gram.rows(), gram.cols())) > kChannelTol) {
    throw Error(ErrorKind::invalid_input, "Stinespring operator is not an isometry");
  }
  const auto in = static_cast<std::size_t>(isometry.cols());
  const auto out = static_cast<std::size_t>(isometry.rows()) / env_dim;
  return ChannelRep(StinespringBody{std::move(isometry), env_dim}, in, out);
}

ChannelRep ChannelRep::identity(std::size_t dim) {
  if (dim == 0) throw Error(ErrorKind::invalid_dimension, "identity channel: dim must be positive");
  const auto n = static_cast<Index>(dim);
  return from_kraus({Matrix::Identity(n, n)});
}

ChannelRep ChannelRep::replacement(std::size_t in_dim, const Matrix& omega) {
  const auto w = DensityOperator::from_matrix(omega);
  if (!w.normalized()) throw Error(ErrorKind::invalid_input, "replacement state must have unit trace");
  const auto out = static_cast<std::size_t>(omega.rows());
  const auto in = static_cast<Index>(in_dim);
  const Matrix id = Matrix::Identity(in, in);
  // J = omega (x) 1
  return from_choi(tensor(w.matrix(), id), in_dim, out);
}

ChannelRep ChannelRep::completely_depolarizing(std::size_t dim) {
  if (dim == 0) throw Error(ErrorKind::invalid_dimension, "depolarizing channel: dim must be positive");
  const auto n = static_cast<Index>(dim);
  std::vector<Matrix> ops;
  const double s = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Matrix k = Matrix::Zero(n, n);
      k(i, j) = s;
      ops.push_back(std::move(k));
    }
  }
  return from_kraus(std::move(ops));
}

ChannelRep ChannelRep::from_dilation(const Matrix& unitary, std::size_t in_dim, const Vector& ancilla,
                                     std::size_t out_dim) {
  const auto in = static_cast<Index>(in_dim);
  const Index total = in * ancilla.size();
  if (unitary.rows() != total || unitary.cols() != total) {
    throw Error(ErrorKind::invalid_input, "dilation unitary must act on input (x) ancilla");
  }
  if (out_dim == 0 || total % static_cast<Index>(out_dim) != 0) {
    throw Error(ErrorKind::invalid_input, "output dimension must divide the dilation dimension");
  }
  const Matrix embed = tensor(Matrix(Matrix::Identity(in, in)), Matrix(ancilla));
  const Matrix full = unitary * embed;  // rows ordered (env, out)
  const auto out = static_cast<Index>(out_dim);
  const Index env = total / out;
  Matrix v(total, in);
  for (Index e = 0; e < env; ++e) {
    for (Index o = 0; o < out; ++o) v.row(o * env + e) = full.row(e * out + o);
  }
  return from_stinespring(std::move(v), static_cast<std::size_t>(env));
}

ChannelKind ChannelRep::kind() const { return static_cast<ChannelKind>(body_.index()); }

Matrix apply_choi(const Matrix& choi, std::size_t in_dim, std::size_t out_dim, const Matrix& x) {
  const auto d = static_cast<Index>(in_dim);
  const auto m = static_cast<Index>(out_dim);
  Matrix y(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) y(a, b) = choi.block(a * d, b * d, d, d).cwiseProduct(x).sum();
  }
  return y;
}

Matrix channel_apply(const ChannelRep& ch, const Matrix& x) {
  if (x.rows() != static_cast<Index>(ch.in_dim()) || x.cols() != x.rows()) {
    throw Error(ErrorKind::invalid_input, "channel_apply: input dimension mismatch");
  }
  return std::visit(
      [&](const auto& body) -> Matrix {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, KrausBody>) {
          const auto out = static_cast<Index>(ch.out_dim());
          Matrix y = Matrix::Zero(out, out);
          for (const auto& k : body.ops) y.noalias() += k * x * k.adjoint();
          return y;
        } else if constexpr (std::is_same_v<T, ChoiBody>) {
          return apply_choi(body.choi, ch.in_dim(), ch.out_dim(), x);
        } else {
          const std::size_t dims[] = {ch.out_dim(), body.env_dim};
          return partial_trace(Matrix(body.isometry * x * body.isometry.adjoint()), dims, 1);
        }
      },
      ch.body());
}

DensityOperator channel_apply(const ChannelRep& ch, const DensityOperator& rho) {
  if (rho.dim() != ch.in_dim()) throw Error(ErrorKind::invalid_input, "channel_apply: input dimension mismatch");
  Matrix y = hermitian_part(channel_apply(ch, rho.matrix()));
  // round-off can leave eigenvalues a hair below zero or the trace a hair above the input's
  return DensityOperator::from_matrix(y);
}

std::vector<Matrix> kraus_operators(const ChannelRep& ch) {
  return std::visit(
      [&](const auto& body) -> std::vector<Matrix> {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, KrausBody>) {
          return body.ops;
        } else if constexpr (std::is_same_v<T, ChoiBody>) {
          return kraus_from_choi(body.choi, static_cast<Index>(ch.in_dim()), static_cast<Index>(ch.out_dim()));
        } else {
          return kraus_from_stinespring(body.isometry, body.env_dim);
        }
      },
      ch.body());
}

Matrix choi_matrix(const ChannelRep& ch) {
  if (const auto* c = std::get_if<ChoiBody>(&ch.body())) return c->choi;
  return choi_from_kraus(kraus_operators(ch));
}

ChannelRep channel_convert(const ChannelRep& ch, ChannelKind target) {
  if (ch.kind() == target) return ch;
  switch (target) {
    case ChannelKind::kraus: return ChannelRep::from_kraus(kraus_operators(ch));
    case ChannelKind::choi: return ChannelRep::from_choi(choi_matrix(ch), ch.in_dim(), ch.out_dim());
    case ChannelKind::stinespring: {
      auto ops = kraus_operators(ch);
      const std::size_t env = ops.size();
      return ChannelRep::from_stinespring(stinespring_from_kraus(ops), env);
    }
  }
  throw Error(ErrorKind::invalid_input, "channel_convert: unknown target");
}

ChannelRep conjugate_output(const ChannelRep& ch, const Matrix& unitary) {
  auto ops = kraus_operators(ch);
  for (auto& k : ops) k = unitary * k;
  return ChannelRep::from_kraus(std::move(ops));
}

}  // namespace qcomp
