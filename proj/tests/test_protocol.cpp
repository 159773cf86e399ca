#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qcomp/fitting.hpp"
#include "qcomp/lmi.hpp"
#include "qcomp/metrics.hpp"
#include "qcomp/protocol.hpp"

using namespace qcomp;

namespace {

DensityOperator ket(Index d, Index i) {
  Vector v = Vector::Zero(d);
  v(i) = 1.0;
  return DensityOperator::pure(v);
}

double error_oracle(const CqState& tau, const std::vector<Matrix>& outputs) {
  double s = 0.0;
  for (std::size_t x = 0; x < tau.size(); ++x) s += tau.probs()[x] * oracle::singular_sum(tau.states()[x].matrix() - outputs[x]);
  return s;
}

UnassistedProtocol constant_protocol(std::size_t n, const Matrix& omega) {
  UnassistedProtocol p;
  p.message_dim = 1;
  p.message_states.assign(n, DensityOperator::maximally_mixed(1));
  p.decoder = ChannelRep::replacement(1, omega);
  return p;
}

}  // namespace

TEST_CASE("hermitian coordinates are an isometry") {
  Rng rng(RngSeed{1, 0});
  const Matrix a = random_hermitian(4, rng), b = random_hermitian(4, rng);
  CHECK(std::abs(lmi::herm_to_vec(a).dot(lmi::herm_to_vec(b)) - (a * b).trace().real()) <= 1e-12);
  CHECK(max_abs_diff(lmi::vec_to_herm(lmi::herm_to_vec(a), 4), a) <= 1e-14);
}

TEST_CASE("barrier solver: trace of the positive part") {
  // min Tr X  s.t.  X >= 0, X >= A  has value Tr A_+.
  Rng rng(RngSeed{2, 0});
  const Index n = 3;
  const Matrix a = random_hermitian(n, rng);
  lmi::Problem prob;
  prob.global_size = n * n;
  prob.c_global = lmi::herm_to_vec(Matrix::Identity(n, n));
  prob.eq_a = lmi::RealMatrix::Zero(0, n * n);
  prob.eq_b = RealVector::Zero(0);
  lmi::Lmi pos;
  pos.size = n;
  pos.constant = Matrix::Zero(n, n);
  pos.global = lmi::Lmi::Global::identity;
  lmi::Lmi dom = pos;
  dom.constant = -a;
  prob.lmis = {pos, dom};
  const double scale = a.norm() + 1.0;
  const lmi::Result r = lmi::solve(prob, lmi::herm_to_vec(Matrix::Identity(n, n) * scale), {}, lmi::Options{});
  const auto eig = hermitian_eig(a);
  double expected = 0.0;
  for (Index i = 0; i < n; ++i) expected += std::max(eig.values(i), 0.0);
  CHECK(r.converged);
  CHECK(std::abs(r.objective - expected) <= 1e-7);
  CHECK(r.gap_bound <= 1e-9);
}

TEST_CASE("trace-norm fit recovers a reachable target") {
  Rng rng(RngSeed{3, 0});
  const Matrix rho = random_density_matrix(3, 3, rng);
  TraceFitProblem prob;
  prob.x_dim = 3;
  prob.targets = {rho};
  prob.weights = {1.0};
  prob.maps = {std::nullopt};
  prob.eq_a = lmi::herm_to_vec(Matrix::Identity(3, 3)).transpose();
  prob.eq_b = RealVector::Ones(1);
  prob.start = Matrix::Identity(3, 3) / 3.0;
  const TraceFitResult r = fit_trace_norm(prob, lmi::Options{});
  CHECK(r.objective <= 1e-6);
  CHECK(max_abs_diff(r.x, rho) <= 1e-5);
}

TEST_CASE("repaired Choi matrices are channels") {
  Rng rng(RngSeed{4, 0});
  const Matrix junk = random_hermitian(6, rng);
  const Matrix j = repair_choi(junk, 2, 3);
  CHECK_NOTHROW(ChannelRep::from_choi(j, 2, 3));
  // an actual channel is left unchanged
  const Matrix good = choi_matrix(ChannelRep::completely_depolarizing(3));
  CHECK(max_abs_diff(repair_choi(good, 3, 3), good) <= 1e-10);
}

TEST_CASE("average error conventions") {
  const JrsEnsemble e = generate_jrs(EnsembleParams{8, 2, 4, 1});
  const CqState tau = to_cq_state(e);
  UnassistedProtocol ideal;
  ideal.message_dim = 8;
  ideal.message_states = tau.states();
  ideal.decoder = ChannelRep::identity(8);
  CHECK(average_error(ideal, e) <= 1e-12);
  CHECK(cost_report(ideal).comm_bits == doctest::Approx(3.0));
  CHECK(cost_report(ideal).ent_bits == 0.0);

  // constant I/m output: eigenvalues (k-1)/m on m/k dims and -1/m on the rest
  for (auto p : {EnsembleParams{8, 2, 4, 1}, EnsembleParams{12, 3, 2, 2}, EnsembleParams{16, 4, 2, 3}}) {
    const JrsEnsemble f = generate_jrs(p);
    const double k = static_cast<double>(p.k);
    const UnassistedProtocol flat = constant_protocol(f.size(), Matrix::Identity(p.m, p.m) / static_cast<double>(p.m));
    CHECK(std::abs(average_error(flat, f) - 2.0 * (k - 1.0) / k) <= 1e-10);
  }
}

TEST_CASE("average error is invariant under joint unitary conjugation") {
  Rng rng(RngSeed{5, 0});
  std::vector<DensityOperator> states;
  for (int x = 0; x < 3; ++x) states.push_back(DensityOperator::from_matrix(random_density_matrix(3, 2, rng)));
  const CqState tau({0.2, 0.3, 0.5}, states);
  UnassistedProtocol p;
  p.message_dim = 2;
  for (int x = 0; x < 3; ++x) p.message_states.push_back(DensityOperator::from_matrix(random_density_matrix(2, 2, rng)));
  p.decoder = ChannelRep::from_stinespring(haar_unitary(6, rng).leftCols(2), 2);
  const double base = average_error(p, tau);
  CHECK(std::abs(base - error_oracle(tau, protocol_outputs(p))) <= 1e-10);

  const Matrix u = haar_unitary(3, rng);
  std::vector<DensityOperator> rotated;
  for (const auto& s : states) rotated.push_back(DensityOperator::from_matrix(hermitian_part(u * s.matrix() * u.adjoint())));
  UnassistedProtocol q = p;
  q.decoder = conjugate_output(p.decoder, u);
  CHECK(std::abs(average_error(q, CqState({0.2, 0.3, 0.5}, rotated)) - base) <= 1e-10);
}

TEST_CASE("assisted protocols") {
  const JrsEnsemble e = generate_jrs(EnsembleParams{4, 2, 2, 6});
  const CqState tau = to_cq_state(e);

  // decoder ignores both the message and the shared state
  Rng rng(RngSeed{6, 0});
  const Matrix omega = random_density_matrix(4, 4, rng);
  AssistedProtocol a;
  a.ea_dim = 2;
  a.eb_dim = 2;
  a.message_dim = 2;
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  a.shared_state = PureState::from_amplitudes(phi);
  a.encoders.assign(tau.size(), Matrix::Identity(2, 2));
  a.decoder = ChannelRep::replacement(4, omega);
  CHECK(std::abs(average_error(a, tau) - average_error(constant_protocol(tau.size(), omega), tau)) <= 1e-12);
  const CostReport c = cost_report(a);
  CHECK(c.comm_bits == doctest::Approx(1.0));
  CHECK(c.ent_bits == doctest::Approx(1.0));
  CHECK(c.sum_bits == doctest::Approx(2.0));

  // Alice forwards her half: Bob holds the maximally entangled pair
  a.decoder = ChannelRep::identity(4);
  const Matrix pair = phi * phi.adjoint();
  CHECK(std::abs(average_error(a, tau) - error_oracle(tau, std::vector<Matrix>(tau.size(), pair))) <= 1e-12);

  // product shared state costs no entanglement
  Vector prod = Vector::Zero(4);
  prod(0) = 1.0;
  a.shared_state = PureState::from_amplitudes(prod);
  CHECK(cost_report(a).ent_bits == 0.0);

  // joint output register m * d * eb = 65 * 64 exceeds the cap
  AssistedProtocol big;
  big.ea_dim = 1;
  big.eb_dim = 64;
  big.message_dim = 1;
  big.shared_state = PureState::from_amplitudes(Vector::Unit(64, 0));
  big.encoders.assign(2, Matrix::Identity(1, 1));
  Matrix v = Matrix::Zero(65 * 64, 64);
  for (Index i = 0; i < 64; ++i) v(i, i) = 1.0;  // |0> (x) identity, output factor first
  big.decoder = ChannelRep::from_stinespring(v, 64);
  try {
    big.validate();
    FAIL("cap not enforced");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::infeasible_scale);
  }
}

TEST_CASE("best constant output") {
  Rng rng(RngSeed{7, 0});
  const DensityOperator rho = DensityOperator::from_matrix(random_density_matrix(3, 3, rng));
  const ConstantOutput single = best_constant_output(CqState({1.0}, {rho}), 1e-8);
  CHECK(single.error <= 1e-12);

  // two orthogonal pure states: every omega scores at least 1, the triangle bound
  const ConstantOutput orth = best_constant_output(CqState::uniform({ket(2, 0), ket(2, 1)}), 1e-8);
  CHECK(std::abs(orth.error - 1.0) <= 1e-6);

  const JrsEnsemble e = generate_jrs(EnsembleParams{4, 2, 3, 2});
  const CqState tau = to_cq_state(e);
  const ConstantOutput best = best_constant_output(tau, 1e-8);
  CHECK(best.converged);
  CHECK(best.error <= 1.0 + 1e-9);
  // no random or structured candidate beats it
  const UnassistedProtocol flat = constant_protocol(tau.size(), Matrix::Identity(4, 4) / 4.0);
  CHECK(best.error <= average_error(flat, tau) + 1e-8);
  for (int t = 0; t < 200; ++t) {
    const Matrix w = random_density_matrix(4, 1 + t % 4, rng);
    CHECK(best.error <= error_oracle(tau, std::vector<Matrix>(tau.size(), w)) + 1e-8);
  }
  for (std::size_t x = 0; x < tau.size(); ++x) {
    CHECK(best.error <= error_oracle(tau, std::vector<Matrix>(tau.size(), tau.states()[x].matrix())) + 1e-8);
  }
}

TEST_CASE("trivial protocols") {
  const JrsEnsemble e = generate_jrs(EnsembleParams{4, 2, 3, 3});
  const auto trivial = trivial_protocols(e);
  REQUIRE(trivial.size() == 3);
  CHECK(trivial[0].name == "send-state");
  CHECK(trivial[0].error <= 1e-12);
  CHECK(trivial[0].cost.comm_bits == doctest::Approx(2.0));
  CHECK(trivial[0].cost.ent_bits == 0.0);
  CHECK(trivial[1].name == "send-index");
  CHECK(trivial[1].error <= 1e-12);
  CHECK(trivial[1].cost.comm_bits == doctest::Approx(std::log2(6.0)));
  CHECK(trivial[2].name == "send-nothing");
  CHECK(trivial[2].cost.comm_bits == 0.0);
  CHECK(trivial[2].error <= 1.0 + 1e-9);
  CHECK(std::abs(trivial[2].error - best_constant_output(to_cq_state(e), 1e-8).error) <= 1e-7);
}

TEST_CASE("see-saw attack") {
  const JrsEnsemble e = generate_jrs(EnsembleParams{4, 2, 2, 5});
  const CqState tau = to_cq_state(e);
  AttackOptions opts;
  opts.restarts = 2;
  opts.seed = 3;

  const AttackResult full = attack_seesaw(tau, 4, opts);
  CHECK(full.error <= 1e-6);

  const AttackResult one = attack_seesaw(tau, 1, opts);
  const ConstantOutput best = best_constant_output(tau, 1e-9);
  CHECK(one.error <= 1.0 + 1e-9);
  CHECK(one.error >= best.error - 1e-6);

  for (const AttackResult* r : {&full, &one}) {
    REQUIRE(r->traces.size() == r->start_labels.size());
    for (const auto& trace : r->traces) {
      for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
    }
    // serialized protocol reproduces the reported error
    const UnassistedProtocol back = unassisted_from_json(Json::parse(to_json(r->protocol).dump()));
    CHECK(std::abs(error_oracle(tau, protocol_outputs(back)) - r->error) <= 1e-9);
  }

  const std::vector<std::size_t> dims{1, 2, 4};
  const auto sweep = attack_sweep(tau, dims, opts);
  for (std::size_t i = 1; i < sweep.size(); ++i) CHECK(sweep[i].error <= sweep[i - 1].error + 1e-6);

  // thread count does not change the result
  AttackOptions threaded = opts;
  threaded.threads = 3;
  const AttackResult again = attack_seesaw(tau, 2, threaded);
  const AttackResult serial = attack_seesaw(tau, 2, opts);
  CHECK(again.error == serial.error);
  CHECK(again.best_start == serial.best_start);
  CHECK(to_json(again.protocol).dump() == to_json(serial.protocol).dump());
}

TEST_CASE("attack scale limit") {
  const JrsEnsemble e = generate_jrs(EnsembleParams{32, 2, 1, 1});
  try {
    attack_seesaw(to_cq_state(e), 16, AttackOptions{});
    FAIL("scale limit not enforced");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::infeasible_scale);
  }
}

TEST_CASE("padding keeps the error") {
  const JrsEnsemble e = generate_jrs(EnsembleParams{4, 2, 2, 9});
  const CqState tau = to_cq_state(e);
  AttackOptions opts;
  opts.restarts = 1;
  const AttackResult r = attack_seesaw(tau, 2, opts);
  const UnassistedProtocol padded = pad_protocol(r.protocol, 3);
  CHECK(padded.message_dim == 3);
  CHECK(std::abs(average_error(padded, tau) - r.error) <= 1e-10);
}

TEST_CASE("channel and protocol serialization") {
  Rng rng(RngSeed{8, 0});
  const ChannelRep stine = ChannelRep::from_stinespring(haar_unitary(4, rng).leftCols(2), 2);
  for (const ChannelRep& ch : {stine, channel_convert(stine, ChannelKind::kraus), channel_convert(stine, ChannelKind::choi)}) {
    const ChannelRep back = channel_from_json(Json::parse(channel_to_json(ch).dump()));
    CHECK(back.kind() == ch.kind());
    const Matrix x = random_density_matrix(2, 2, rng);
    CHECK(max_abs_diff(channel_apply(back, x), channel_apply(ch, x)) <= 1e-14);
  }
  Json bad = channel_to_json(channel_convert(stine, ChannelKind::choi));
  bad["choi"] = matrix_to_json(Matrix::Identity(4, 4));
  try {
    channel_from_json(Json::parse(bad.dump()));
    FAIL("invalid channel accepted");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::validation_error);
  }
  CHECK_THROWS_AS(channel_from_json(Json{{"kind", "teleport"}}), Error);
}
