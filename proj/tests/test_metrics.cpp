#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qcomp/metrics.hpp"

using namespace qcomp;

namespace {

DensityOperator basis_state(Index d, Index i) {
  Vector v = Vector::Zero(d);
  v(i) = 1.0;
  return DensityOperator::pure(v);
}

DensityOperator random_state(std::size_t d, Rng& rng) {
  return DensityOperator::from_matrix(random_density_matrix(d, 1 + rng.next_u64() % d, rng));
}

}  // namespace

TEST_CASE("trace norm") {
  CHECK(trace_norm(Matrix::Identity(5, 5)) == doctest::Approx(5.0));
  CHECK(trace_norm(basis_state(2, 0).matrix() - basis_state(2, 1).matrix()) == doctest::Approx(2.0));
  Rng rng(RngSeed{1, 0});
  for (int t = 0; t < 10; ++t) {
    const Matrix h = random_hermitian(6, rng);
    const auto e = hermitian_eig(h);
    CHECK(std::abs(trace_norm(h) - e.values.cwiseAbs().sum()) <= 1e-10);
    const Matrix g = Matrix::Random(4, 4);
    CHECK(std::abs(trace_norm(g) - oracle::singular_sum(g)) <= 1e-10);
  }
}

TEST_CASE("fidelity edge cases and pure-state overlap") {
  Rng rng(RngSeed{2, 0});
  const DensityOperator rho = random_state(4, rng);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fidelity(basis_state(3, 0), basis_state(3, 2)) == doctest::Approx(0.0));
  CHECK(fidelity(DensityOperator::zero(3), DensityOperator::zero(3)) == doctest::Approx(1.0));
  for (int t = 0; t < 20; ++t) {
    const Vector u = random_unit_vector(5, rng), v = random_unit_vector(5, rng);
    CHECK(std::abs(fidelity(DensityOperator::pure(u), DensityOperator::pure(v)) - std::abs(u.dot(v))) <= 1e-9);
  }
  // sub-normalized: both halves of the definition
  const DensityOperator half = DensityOperator::from_matrix(basis_state(2, 0).matrix() * 0.5);
  CHECK(fidelity(half, DensityOperator::zero(2)) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("fidelity matches the Uhlmann oracle and is symmetric") {
  Rng rng(RngSeed{3, 0});
  for (int t = 0; t < 50; ++t) {
    const DensityOperator a = random_state(4, rng), b = random_state(4, rng);
    const double f = fidelity(a, b);
    CHECK(std::abs(f - oracle::fidelity(a.matrix(), b.matrix())) <= 1e-7);
    CHECK(std::abs(f - fidelity(b, a)) <= 1e-10);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
}

TEST_CASE("purified distance") {
  Rng rng(RngSeed{4, 0});
  const DensityOperator rho = random_state(3, rng);
  CHECK(purified_distance(rho, rho) <= 1e-4);
  CHECK(purified_distance(basis_state(2, 0), basis_state(2, 1)) == doctest::Approx(1.0));
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const DensityOperator a = random_state(3, rng), b = random_state(3, rng), c = random_state(3, rng);
    if (purified_distance(a, c) > purified_distance(a, b) + purified_distance(b, c) + 1e-9) ++violations;
  }
  CHECK(violations == 0);
  const DistanceReport r = distance_report(basis_state(2, 0), DensityOperator::maximally_mixed(2));
  CHECK(std::abs(r.purified_distance - std::sqrt(1.0 - r.fidelity * r.fidelity)) <= 1e-10);
  CHECK(r.trace_distance == doctest::Approx(1.0));
}

TEST_CASE("helstrom measurement attains the trace norm") {
  const HelstromResult same = helstrom(basis_state(2, 0), basis_state(2, 0));
  CHECK(same.value == doctest::Approx(0.0));
  const HelstromResult orth = helstrom(basis_state(2, 0), basis_state(2, 1));
  CHECK(orth.value == doctest::Approx(2.0));
  CHECK(max_abs_diff(orth.optimal_measurement, basis_state(2, 0).matrix()) <= 1e-12);
  Rng rng(RngSeed{5, 0});
  for (int t = 0; t < 100; ++t) {
    const DensityOperator a = random_state(4, rng), b = random_state(4, rng);
    const HelstromResult h = helstrom(a, b);
    const Matrix diff = a.matrix() - b.matrix();
    CHECK(std::abs(h.value - oracle::singular_sum(diff)) <= 1e-10);
    CHECK(std::abs(2.0 * (h.optimal_measurement * diff).trace().real() - h.value) <= 1e-10);
    CHECK(max_abs_diff(h.optimal_measurement * h.optimal_measurement, h.optimal_measurement) <= 1e-10);
  }
}

TEST_CASE("Fuchs-van de Graaf ordering") {
  const FvdgSandwich same = fvdg_sandwich(basis_state(3, 1), basis_state(3, 1));
  CHECK(same.holds);
  CHECK(same.mid == doctest::Approx(0.0));
  const FvdgSandwich orth = fvdg_sandwich(basis_state(2, 0), basis_state(2, 1));
  CHECK(orth.holds);
  CHECK(orth.lower == doctest::Approx(1.0));
  CHECK(orth.mid == doctest::Approx(1.0));
  CHECK(orth.upper == doctest::Approx(1.0));
  Rng rng(RngSeed{6, 0});
  for (std::size_t d : {2, 4, 8}) {
    for (int t = 0; t < 300; ++t) {
      const FvdgSandwich s = fvdg_sandwich(random_state(d, rng), random_state(d, rng));
      CHECK(s.holds);
      CHECK(s.mid - s.lower >= -1e-9);
      CHECK(s.upper - s.mid >= -1e-9);
    }
  }
}

TEST_CASE("trace distance conventions") {
  const DensityOperator a = basis_state(2, 0), b = DensityOperator::maximally_mixed(2);
  CHECK(trace_distance(a, b) == doctest::Approx(2.0 * half_trace_distance(a, b)));
  CHECK(to_json(distance_report(a, b)).contains("purified_distance"));
}
