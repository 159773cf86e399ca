#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "qcomp/bounds.hpp"

using namespace qcomp;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

Big log2b(const Big& x) { return log(x) / log(Big(2)); }

Big c2_big() { return log2b(Big(16) * 768); }

Big comm_ent_oracle(const Big& eps, const Big& m) {
  const Big inv = 1 / (1 - eps);
  return log2b(m) - 2 * log2b(inv) - log2b(log(16 * inv)) - c2_big();
}

Big three_log_oracle(const Big& eps, const Big& m) { return log2b(m) - 3 * log2b(1 / (1 - eps)) - c2_big(); }

void check_close(double got, const Big& want, double rel = 1e-12) {
  const double w = want.convert_to<double>();
  CHECK(std::abs(got - w) <= rel * std::max(1.0, std::abs(w)));
}

}  // namespace

TEST_CASE("proof constants") {
  CHECK(kC1 == 18433.0);
  CHECK(kC3 == 73729.0);
  check_close(c2(), log2b(Big(12288)));
  CHECK(c2() == doctest::Approx(12.0 + std::log2(3.0)).epsilon(1e-15));
  check_close(thm3_gamma(1.0, 0.25), Big(1) / 98304);
  const BoundReport r = constants_report();
  CHECK(r.values.at("c1") == kC1);
  CHECK(r.values.at("c3") == kC3);
  CHECK(r.values.at("gamma_eps1_nu_quarter") == thm3_gamma(1.0, 0.25));
}

TEST_CASE("communication plus entanglement bound") {
  const double m = std::ldexp(1.0, 20);
  const double b = cor5_bound(0.5, m);
  CHECK(std::abs(b - 2.6218) <= 5e-4);
  check_close(b, comm_ent_oracle(Big("0.5"), Big(m)));
  for (double eps : {0.01, 0.1, 0.3, 0.5, 0.9, 0.999}) {
    for (double mm : {16.0, 1024.0, 1e6, 1e12}) check_close(cor5_bound(eps, mm), comm_ent_oracle(Big(eps), Big(mm)));
  }

  const BoundReport r = cor5_report(0.5, 4, m, 1e12);
  REQUIRE(r.bound_bits);
  CHECK(*r.bound_bits == b);
  CHECK_FALSE(r.vacuous);
  CHECK(r.conditions.at("k").holds == false);  // needs k >= 12 at eps = 1/2
  CHECK(r.conditions.at("k").rhs == doctest::Approx(12.0));
  check_close(r.conditions.at("m").rhs, Big(18433) * log(Big(4)) * 4);
  check_close(r.conditions.at("n").rhs, Big(73729) * 4 * 4 * Big(m) * Big(m) * Big(m) * log(16 * sqrt(Big(m)) / Big("0.5")));
  CHECK(cor5_report(0.5, 4, 1024, 1).vacuous);

  // monotone in m and eps
  double prev = cor5_bound(0.5, 2.0);
  for (int e = 2; e < 40; ++e) {
    const double v = cor5_bound(0.5, std::ldexp(1.0, e));
    CHECK(v > prev);
    prev = v;
  }
  prev = cor5_bound(0.01, m);
  for (int i = 2; i < 99; ++i) {
    const double v = cor5_bound(0.01 * i, m);
    CHECK(v < prev);
    prev = v;
  }
  for (double eps : {0.0, 1.0, -0.1, std::nan("")}) {
    try {
      cor5_bound(eps, m);
      FAIL("epsilon accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_parameter);
    }
  }
  CHECK_THROWS_AS(cor5_report(0.5, 2.5, m, 1), Error);
}

TEST_CASE("entanglement after communication") {
  const double m = std::ldexp(1.0, 20);
  const BoundReport zero = ent_lb_given_comm(0.5, m, 0.0);
  CHECK(*zero.bound_bits == cor5_bound(0.5, m));
  const BoundReport half = ent_lb_given_comm(0.5, m, 1.0);
  CHECK(std::abs(*half.bound_bits - 1.6218) <= 5e-4);
  check_close(*half.bound_bits, comm_ent_oracle(Big("0.5"), Big(m)) - 1);
  CHECK_FALSE(half.vacuous);
  CHECK(ent_lb_given_comm(0.5, m, 3.0).vacuous);
  CHECK_THROWS_AS(ent_lb_given_comm(0.5, m, -1.0), Error);
}

TEST_CASE("upper-bound cost arithmetic") {
  CHECK(prop6_cost(4, 0.5, 3.0) == doctest::Approx(1.0));          // log2 log2 2 = 0
  CHECK(prop6_cost(16, 1.0 / 65536.0, 1.0) == doctest::Approx(6.0));  // 2 + log2 16
  CHECK(prop6_cost(16, 0.75, 5.0) == doctest::Approx(2.0));         // negative term clamped
  check_close(prop6_cost(1024, 1e-3, 2.5), log2b(Big(1024)) / 2 + Big("2.5") * log2b(log2b(1 / Big("1e-3"))));
  CHECK_THROWS_AS(prop6_cost(0, 0.5, 1.0), Error);
  CHECK_THROWS_AS(prop6_cost(4, 1.0, 1.0), Error);
}

TEST_CASE("three-log bound next to the explicit one") {
  for (double eps : {0.05, 0.2, 0.5, 0.7, 0.8, 0.9, 0.99}) {
    for (double m : {1e4, 1e8}) {
      const BoundReport r = thm1_summary(4, m, eps);
      check_close(r.values.at("thm1_bound"), three_log_oracle(Big(eps), Big(m)));
      check_close(r.values.at("cor5_bound"), comm_ent_oracle(Big(eps), Big(m)));
      CHECK(r.values.at("mutual_info") == 2.0);
      CHECK(r.values.at("max_info") == 2.0);
      const bool le = three_log_oracle(Big(eps), Big(m)) <= comm_ent_oracle(Big(eps), Big(m));
      CHECK(r.flags.at("thm1_le_cor5") == le);
    }
  }
  // the ordering flips between eps = 0.7 and 0.8
  CHECK_FALSE(thm1_summary(4, 1e6, 0.7).flags.at("thm1_le_cor5"));
  CHECK(thm1_summary(4, 1e6, 0.8).flags.at("thm1_le_cor5"));
  const BoundReport bad = thm1_summary(3, 1e6, 0.5);
  CHECK_FALSE(bad.conditions.at("k_divides_m").holds);
  CHECK_FALSE(bad.conditions.at("k").holds);
}

TEST_CASE("side conditions with slack") {
  Thm3Params p;
  p.epsilon = 1.0;
  p.nu = 0.25;
  p.beta = 0.5;
  p.k = 16;
  p.m = 1 << 24;
  p.d = 2;
  p.n = 1 << 24;
  const BoundReport r = thm3_check(p);
  REQUIRE(r.gamma);
  CHECK(*r.gamma == doctest::Approx(1.0 / 98304.0));
  CHECK(r.conditions.at("k").rhs == doctest::Approx(16.0));
  CHECK(r.conditions.at("k").holds);
  const Big g = Big(1) / 98304;
  check_close(r.values.at("m_rhs_beta_term"), 3 / g * log(exp(Big(1)) / Big("0.5")));
  check_close(r.values.at("m_rhs_k_term"), 3 / g * log(Big(16)));
  check_close(r.values.at("m_rhs_d_term"), 2 + 2 / g * log(Big(16) / Big("0.25")));
  CHECK(r.conditions.at("m").holds);
  check_close(r.conditions.at("n").rhs, 6 * Big(16) * 4 * Big(1 << 24) / (g * Big("0.5")) * log(8 * sqrt(Big(2)) / Big("0.25")));
  CHECK_FALSE(r.conditions.at("n").holds);
  CHECK_FALSE(r.flags.at("all_conditions_hold"));

  p.nu = 0.5;  // leaves no room below 1 - eps/2
  CHECK_THROWS_AS(thm3_check(p), Error);
  p.nu = 0.25;
  p.k = 3;
  CHECK_THROWS_AS(thm3_check(p), Error);
}

TEST_CASE("report rendering") {
  const BoundReport r = cor5_report(0.5, 4, 1 << 20, 1e12);
  const Json j = to_json(r);
  CHECK(j.at("name") == "cor5");
  CHECK(j.at("conditions").at("m").contains("lhs"));
  CHECK(to_csv(r, 6).rfind("report,quantity,value,lhs,rhs\n", 0) == 0);
  const std::string table = to_table(r, 6);
  CHECK(table.find("bound_bits") != std::string::npos);
  CHECK(table.find("vacuous") != std::string::npos);
}
