#include <doctest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "qcomp/qcore.hpp"
#include "qcomp/serialize.hpp"

using namespace qcomp;

namespace {

Matrix basis_op(Index d, Index i, Index j) {
  Matrix e = Matrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

}  // namespace

TEST_CASE("haar unitaries are unitary and reproducible") {
  for (std::size_t d : {1, 2, 5, 16}) {
    const Matrix u = haar_unitary(d, RngSeed{3, d});
    CHECK(max_abs_diff(u.adjoint() * u, Matrix::Identity(u.rows(), u.cols())) <= 1e-10);
    CHECK(max_abs_diff(u, haar_unitary(d, RngSeed{3, d})) == 0.0);
  }
  CHECK(std::abs(std::abs(haar_unitary(1, RngSeed{9, 0})(0, 0)) - 1.0) <= 1e-12);
  CHECK(max_abs_diff(haar_unitary(4, RngSeed{1, 0}), haar_unitary(4, RngSeed{1, 1})) > 1e-3);
  CHECK_THROWS_AS(haar_unitary(0, RngSeed{}), Error);
}

TEST_CASE("haar first moment matches the invariant value 1/m") {
  // |U_11|^2 is Beta(1, m-1) distributed with mean 1/m.
  const std::size_t m = 8;
  const int draws = 20000;
  Rng rng(RngSeed{17, 0});
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < draws; ++t) {
    const double v = std::norm(haar_unitary(m, rng)(0, 0));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - 1.0 / m) <= 3.0 * se);
}

TEST_CASE("projected first moment equals rank over dimension") {
  const std::size_t m = 6, rank = 2;
  Matrix p = Matrix::Zero(m, m);
  p(0, 0) = p(1, 1) = 1.0;
  Rng rng(RngSeed{5, 0});
  const Vector v = random_unit_vector(m, rng);
  const int draws = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < draws; ++t) {
    const Matrix u = haar_unitary(m, rng);
    const double f = (v.adjoint() * u * p * u.adjoint() * v)(0, 0).real();
    sum += f;
    sum2 += f * f;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  CHECK(std::abs(mean - static_cast<double>(rank) / m) <= 3.0 * se);
}

TEST_CASE("tensor product shapes and mixed-product rule") {
  CHECK(max_abs_diff(tensor(Matrix(Matrix::Identity(2, 2)), Matrix(Matrix::Identity(3, 3))), Matrix::Identity(6, 6)) == 0.0);
  Rng rng(RngSeed{2, 0});
  const Matrix a = Matrix::Random(2, 3), b = Matrix::Random(4, 5);
  const Matrix ab = tensor(a, b);
  CHECK(ab.rows() == 8);
  CHECK(ab.cols() == 15);
  const Vector u = Vector::Random(3), v = Vector::Random(5);
  CHECK(max_abs_diff(ab * tensor(u, v), tensor(Vector(a * u), Vector(b * v))) <= 1e-12);
}

TEST_CASE("partial trace against the index-sum oracle") {
  Rng rng(RngSeed{4, 0});
  const Matrix rho = random_density_matrix(2, 2, rng), sigma = random_density_matrix(3, 3, rng);
  const std::array<std::size_t, 2> dims{2, 3};
  const Matrix joint = tensor(rho, sigma);
  CHECK(max_abs_diff(partial_trace(joint, dims, 1), rho * sigma.trace()) <= 1e-12);
  CHECK(max_abs_diff(partial_trace(joint, dims, 0), sigma * rho.trace()) <= 1e-12);

  const Matrix x = Matrix::Random(4, 4);
  const std::array<std::size_t, 2> d22{2, 2};
  CHECK(max_abs_diff(partial_trace(x, d22, 1), oracle::ptrace_second(x, 2, 2)) <= 1e-12);
  CHECK(max_abs_diff(partial_trace(x, d22, 0), oracle::ptrace_first(x, 2, 2)) <= 1e-12);

  // maximally entangled state
  const Index d = 3;
  Vector phi = Vector::Zero(d * d);
  for (Index i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(3.0);
  const Matrix ent = phi * phi.adjoint();
  const std::array<std::size_t, 2> d33{3, 3};
  CHECK(max_abs_diff(partial_trace(ent, d33, 0), Matrix::Identity(d, d) / 3.0) <= 1e-12);
  CHECK(max_abs_diff(partial_trace(ent, d33, 1), Matrix::Identity(d, d) / 3.0) <= 1e-12);

  const std::array<std::size_t, 2> bad{2, 2};
  CHECK_THROWS_AS(partial_trace(Matrix::Identity(6, 6), bad, 0), Error);
}

TEST_CASE("partial trace over several factors") {
  Rng rng(RngSeed{8, 0});
  const Matrix a = random_density_matrix(2, 2, rng), b = random_density_matrix(3, 3, rng), c = random_density_matrix(2, 2, rng);
  const std::array<std::size_t, 3> dims{2, 3, 2};
  const std::array<std::size_t, 2> traced{0, 2};
  CHECK(max_abs_diff(partial_trace(tensor(tensor(a, b), c), dims, traced), b) <= 1e-12);
}

TEST_CASE("hermitian eigendecomposition") {
  const auto id = hermitian_eig(Matrix::Identity(4, 4));
  for (Index i = 0; i < 4; ++i) CHECK(id.values(i) == doctest::Approx(1.0));
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 2.0;
  const auto e = hermitian_eig(d);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(2.0));
  CHECK(e.values(2) == doctest::Approx(3.0));

  Rng rng(RngSeed{6, 0});
  const Matrix h = random_hermitian(12, rng);
  const auto eh = hermitian_eig(h);
  const Matrix rec = eh.vectors * eh.values.cast<Complex>().asDiagonal() * eh.vectors.adjoint();
  CHECK((h - rec).norm() <= 1e-10 * h.norm());
  CHECK_THROWS_AS(hermitian_eig(Matrix::Random(3, 3) * 10.0), Error);
}

TEST_CASE("density operator validation") {
  CHECK(DensityOperator::maximally_mixed(4).normalized());
  CHECK_FALSE(DensityOperator::zero(3).normalized());
  CHECK(DensityOperator::from_matrix(Matrix::Identity(2, 2) * 0.25).trace() == doctest::Approx(0.5));
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.1;
  neg(1, 1) = -0.1;
  CHECK_THROWS_AS(DensityOperator::from_matrix(neg), Error);
  CHECK_THROWS_AS(DensityOperator::from_matrix(Matrix::Identity(2, 2)), Error);
  Vector v(2);
  v << 1.0, 1.0;
  CHECK_THROWS_AS(PureState::from_amplitudes(v), Error);
  CHECK(PureState::normalize(v).amplitudes().norm() == doctest::Approx(1.0));
}

TEST_CASE("subspace frames") {
  Matrix vecs(3, 3);
  vecs << 1, 0, 1, 0, 1, 1, 0, 0, 0;
  const Subspace s = Subspace::span(vecs);
  CHECK(s.dim() == 2);
  CHECK(max_abs_diff(s.frame().adjoint() * s.frame(), Matrix::Identity(2, 2)) <= 1e-10);
  CHECK(Subspace::canonical(5, 2).projector().trace().real() == doctest::Approx(2.0));
  CHECK_THROWS_AS(Subspace(Matrix::Ones(3, 2)), Error);
}

TEST_CASE("standard channels") {
  Rng rng(RngSeed{10, 0});
  const DensityOperator rho = DensityOperator::from_matrix(random_density_matrix(4, 4, rng));
  CHECK(max_abs_diff(channel_apply(ChannelRep::identity(4), rho).matrix(), rho.matrix()) <= 1e-14);
  CHECK(max_abs_diff(channel_apply(ChannelRep::completely_depolarizing(4), rho).matrix(), Matrix::Identity(4, 4) / 4.0) <= 1e-12);
  CHECK_THROWS_AS(channel_apply(ChannelRep::identity(3), rho), Error);

  // identity Choi is the unnormalized maximally entangled projector
  const Matrix j = choi_matrix(ChannelRep::identity(2));
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1.0;
  CHECK(max_abs_diff(j, phi * phi.adjoint()) <= 1e-14);
}

TEST_CASE("representations agree on random inputs") {
  Rng rng(RngSeed{11, 0});
  // random channel 3 -> 2 from a Haar isometry with a 3-dim environment
  const Matrix u = haar_unitary(6, rng);
  const ChannelRep stine = ChannelRep::from_stinespring(u.leftCols(3), 3);
  const ChannelRep kraus = channel_convert(stine, ChannelKind::kraus);
  const ChannelRep choi = channel_convert(stine, ChannelKind::choi);
  const ChannelRep back = channel_convert(channel_convert(kraus, ChannelKind::choi), ChannelKind::kraus);
  for (int t = 0; t < 5; ++t) {
    const DensityOperator rho = DensityOperator::from_matrix(random_density_matrix(3, 3, rng));
    const Matrix ref = channel_apply(stine, rho).matrix();
    CHECK(max_abs_diff(channel_apply(kraus, rho).matrix(), ref) <= 1e-10);
    CHECK(max_abs_diff(channel_apply(choi, rho).matrix(), ref) <= 1e-10);
    CHECK(max_abs_diff(channel_apply(back, rho).matrix(), ref) <= 1e-10);
    CHECK(channel_apply(kraus, rho).trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(min_eigenvalue(channel_apply(kraus, rho).matrix()) >= -1e-9);
  }
  // action on every matrix unit, compared with the defining Choi contraction
  const Matrix j = choi_matrix(kraus);
  for (Index a = 0; a < 3; ++a) {
    for (Index b = 0; b < 3; ++b) {
      Matrix direct = Matrix::Zero(2, 2);
      for (Index r = 0; r < 2; ++r)
        for (Index c = 0; c < 2; ++c) direct(r, c) = j(r * 3 + a, c * 3 + b);
      CHECK(max_abs_diff(channel_apply(back, basis_op(3, a, b)), direct) <= 1e-10);
    }
  }
}

TEST_CASE("stinespring with trivial dilation traces out the environment") {
  // V = identity on C^2 (x) C^2 viewed as C^4 -> out (x) env
  const ChannelRep ch = ChannelRep::from_stinespring(Matrix::Identity(4, 4), 2);
  CHECK(ch.in_dim() == 4);
  CHECK(ch.out_dim() == 2);
  const auto ks = kraus_operators(ch);
  Rng rng(RngSeed{12, 0});
  const Matrix x = random_density_matrix(4, 4, rng);
  const std::array<std::size_t, 2> dims{2, 2};
  CHECK(max_abs_diff(channel_apply(ch, x), partial_trace(x, dims, 1)) <= 1e-12);
}

TEST_CASE("invalid channels are rejected") {
  std::vector<Matrix> ops{Matrix::Identity(2, 2) * 0.5};
  CHECK_THROWS_AS(ChannelRep::from_kraus(ops), Error);
  CHECK_THROWS_AS(ChannelRep::from_choi(Matrix::Identity(4, 4) * 0.3, 2, 2), Error);
  CHECK_THROWS_AS(ChannelRep::from_stinespring(Matrix::Ones(4, 2), 2), Error);
}

TEST_CASE("matrix serialization round trips") {
  Rng rng(RngSeed{13, 0});
  const Matrix m = haar_unitary(3, rng).leftCols(2);
  CHECK(max_abs_diff(matrix_from_json(Json::parse(matrix_to_json(m).dump())), m) == 0.0);
  std::stringstream ss;
  write_matrix_binary(ss, m);
  CHECK(max_abs_diff(read_matrix_binary(ss), m) == 0.0);
  CHECK_THROWS_AS(matrix_from_json(Json{{"rows", 2}}), Error);
}
