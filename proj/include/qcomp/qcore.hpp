#pragma once

// Dense complex linear algebra and the quantum objects built on it: density
// operators, pure states, subspaces and channels in Kraus / Choi / Stinespring
// form.
//
// Conventions:
//  * tensor(a, b) is the Kronecker product, first factor most significant.
//  * Choi matrix of Psi: C^d -> C^m is J = sum_ij Psi(|i><j|) (x) |i><j|,
//    an (m*d) x (m*d) matrix with the output factor first. Trace
//    preservation reads Tr_out J = 1_d.
//  * A Stinespring isometry maps C^in -> C^out (x) C^env (output first); the
//    channel is Tr_env[V X V*].

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qcomp/error.hpp"
#include "qcomp/rng.hpp"

namespace qcomp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kStateTol = 1e-10;
inline constexpr double kChannelTol = 1e-9;

/// Largest absolute entry of a - b.
double max_abs_diff(const Matrix& a, const Matrix& b);

bool is_hermitian(const Matrix& m, double tol);

/// (m + m*) / 2
Matrix hermitian_part(const Matrix& m);

struct EigenDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // columns are eigenvectors
};

/// Eigendecomposition of a Hermitian matrix. Throws invalid-input when the
/// input deviates from Hermitian by more than 1e-8 (relative to its scale).
EigenDecomposition hermitian_eig(const Matrix& m);

/// Apply a real function to the spectrum of a Hermitian matrix.
template <class F>
Matrix hermitian_function(const Matrix& m, F&& f) {
  const auto eig = hermitian_eig(m);
  RealVector fv(eig.values.size());
  for (Index i = 0; i < fv.size(); ++i) fv(i) = f(eig.values(i));
  return eig.vectors * fv.asDiagonal() * eig.vectors.adjoint();
}

double min_eigenvalue(const Matrix& hermitian);
double max_eigenvalue(const Matrix& hermitian);

Matrix tensor(const Matrix& a, const Matrix& b);
Vector tensor(const Vector& a, const Vector& b);

/// Trace out factor `traced_index` of a matrix on (x)_i C^{dims[i]}.
Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims, std::size_t traced_index);

/// Trace out several factors at once; `traced` lists factor indices.
Matrix partial_trace(const Matrix& m, std::span<const std::size_t> dims,
                     std::span<const std::size_t> traced);

/// Haar-distributed unitary: complex Ginibre sample, QR, then the columns of Q
/// rotated by the phases of diag(R).
Matrix haar_unitary(std::size_t dim, Rng& rng);
Matrix haar_unitary(std::size_t dim, RngSeed seed);

/// Uniformly random unit vector (normalized complex Gaussian).
Vector random_unit_vector(std::size_t dim, Rng& rng);

/// Random density matrix of the given rank (rank = dim gives Hilbert-Schmidt measure).
Matrix random_density_matrix(std::size_t dim, std::size_t rank, Rng& rng);

/// Random Hermitian matrix with Gaussian entries.
Matrix random_hermitian(std::size_t dim, Rng& rng);

// ---------------------------------------------------------------------------
// States

/// Positive semi-definite operator with trace at most one. Construction
/// validates: Hermitian to 1e-10, eigenvalues >= -1e-10, trace in [0, 1+1e-10].
class DensityOperator {
 public:
  static DensityOperator from_matrix(const Matrix& m);
  static DensityOperator pure(const Vector& amplitudes);
  static DensityOperator maximally_mixed(std::size_t dim);
  static DensityOperator zero(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  /// Advisory: trace equals one to 1e-10.
  bool normalized() const { return normalized_; }

 private:
  explicit DensityOperator(Matrix m);
  Matrix m_;
  bool normalized_ = false;
};

/// Unit vector; norm checked to 1e-12.
class PureState {
 public:
  static PureState from_amplitudes(const Vector& amplitudes);
  /// Normalizes a nonzero vector first.
  static PureState normalize(const Vector& v);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  DensityOperator density() const { return DensityOperator::pure(amps_); }

 private:
  explicit PureState(Vector v) : amps_(std::move(v)) {}
  Vector amps_;
};

/// Subspace given by an orthonormal frame (ambient_dim x dim).
class Subspace {
 public:
  explicit Subspace(Matrix frame);
  /// Orthonormalize the column span of arbitrary vectors; columns numerically
  /// dependent (singular value < 1e-10 relative) are dropped.
  static Subspace span(const Matrix& vectors);
  static Subspace canonical(std::size_t ambient_dim, std::size_t dim);

  std::size_t ambient_dim() const { return static_cast<std::size_t>(frame_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(frame_.cols()); }
  const Matrix& frame() const { return frame_; }
  Matrix projector() const { return frame_ * frame_.adjoint(); }

 private:
  Matrix frame_;
};

// ---------------------------------------------------------------------------
// Channels

enum class ChannelKind { kraus, choi, stinespring };

std::string_view to_string(ChannelKind kind);
ChannelKind channel_kind_from_string(std::string_view name);

struct KrausBody {
  std::vector<Matrix> ops;  // each out x in
};
struct ChoiBody {
  Matrix choi;  // (out*in) x (out*in)
};
struct StinespringBody {
  Matrix isometry;  // (out*env) x in
  std::size_t env_dim = 1;
};

class ChannelRep {
 public:
  using Body = std::variant<KrausBody, ChoiBody, StinespringBody>;

  /// Validating constructors (tolerance 1e-9).
  static ChannelRep from_kraus(std::vector<Matrix> ops);
  static ChannelRep from_choi(Matrix choi, std::size_t in_dim, std::size_t out_dim);
  static ChannelRep from_stinespring(Matrix isometry, std::size_t env_dim);

  static ChannelRep identity(std::size_t dim);
  /// X -> Tr(X) * omega
  static ChannelRep replacement(std::size_t in_dim, const Matrix& omega);
  /// Kraus {|i><j| / sqrt(d)}; outputs 1/d.
  static ChannelRep completely_depolarizing(std::size_t dim);

  /// Psi(w) = Tr_{first factors}[U (w (x) |a><a|) U*] for U acting on
  /// C^in (x) C^anc and the output taken as the trailing out_dim factor.
  static ChannelRep from_dilation(const Matrix& unitary, std::size_t in_dim, const Vector& ancilla,
                                  std::size_t out_dim);

  ChannelKind kind() const;
  std::size_t in_dim() const { return in_; }
  std::size_t out_dim() const { return out_; }
  const Body& body() const { return body_; }

 private:
  ChannelRep(Body body, std::size_t in, std::size_t out) : body_(std::move(body)), in_(in), out_(out) {}
  Body body_;
  std::size_t in_ = 0;
  std::size_t out_ = 0;
};

/// Linear action on an arbitrary in_dim x in_dim matrix.
Matrix channel_apply(const ChannelRep& ch, const Matrix& x);
DensityOperator channel_apply(const ChannelRep& ch, const DensityOperator& rho);

ChannelRep channel_convert(const ChannelRep& ch, ChannelKind target);

Matrix choi_matrix(const ChannelRep& ch);
std::vector<Matrix> kraus_operators(const ChannelRep& ch);

/// Psi(X)[a,b] = sum_ij J[(a,i),(b,j)] X[i,j]: evaluation straight from a Choi
/// matrix, used by optimizers that never build a validated ChannelRep.
Matrix apply_choi(const Matrix& choi, std::size_t in_dim, std::size_t out_dim, const Matrix& x);

/// Channel followed by conjugation of its output by U.
ChannelRep conjugate_output(const ChannelRep& ch, const Matrix& unitary);

}  // namespace qcomp
