#include "qcomp/bounds.hpp"

#include <algorithm>
#include <array>
#include <vector>
#include <cmath>
#include <cstdio>

#include "qcomp/error.hpp"

namespace qcomp {

double c2() { return std::log2(16.0 * 768.0); }

namespace {

std::string num(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

bool divides(double k, double x) {
  return k >= 1.0 && std::floor(k) == k && std::floor(x) == x && std::fmod(x, k) == 0.0;
}

void require_open(double v, double lo, double hi, const char* name) {
  if (!(v > lo && v < hi)) {
    throw Error(ErrorKind::invalid_parameter,
                std::string(name) + " must lie in (" + num(lo, 6) + ", " + num(hi, 6) + "), got " + num(v, 12));
  }
}

void require_count(double v, const char* name) {
  if (!(v >= 1.0) || std::floor(v) != v) throw Error(ErrorKind::invalid_parameter, std::string(name) + " must be a positive integer");
}

}  // namespace

Json to_json(const BoundReport& r) {
  Json j{{"name", r.name}, {"vacuous", r.vacuous}};
  if (r.gamma) j["gamma"] = *r.gamma;
  if (r.bound_bits) j["bound_bits"] = *r.bound_bits;
  Json conds = Json::object();
  for (const auto& [name, c] : r.conditions) conds[name] = Json{{"holds", c.holds}, {"lhs", c.lhs}, {"rhs", c.rhs}};
  j["conditions"] = conds;
  j["values"] = r.values;
  j["flags"] = r.flags;
  return j;
}

std::string to_table(const BoundReport& r, int precision) {
  std::vector<std::array<std::string, 4>> rows;
  rows.push_back({"quantity", "value", "lhs", "rhs"});
  if (r.gamma) rows.push_back({"gamma", num(*r.gamma, precision), "", ""});
  if (r.bound_bits) rows.push_back({"bound_bits", num(*r.bound_bits, precision), "", ""});
  for (const auto& [name, v] : r.values) rows.push_back({name, num(v, precision), "", ""});
  for (const auto& [name, c] : r.conditions) rows.push_back({name, c.holds ? "holds" : "fails", num(c.lhs, precision), num(c.rhs, precision)});
  for (const auto& [name, f] : r.flags) rows.push_back({name, f ? "true" : "false", "", ""});
  rows.push_back({"vacuous", r.vacuous ? "true" : "false", "", ""});
  std::array<std::size_t, 4> width{};
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out = "# " + r.name + "\n";
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < 4; ++c) {
      line += row[c];
      if (c + 1 < 4) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::string to_csv(const BoundReport& r, int precision) {
  std::string out = "report,quantity,value,lhs,rhs\n";
  auto row = [&](const std::string& q, const std::string& v, const std::string& l, const std::string& h) {
    out += r.name + "," + q + "," + v + "," + l + "," + h + "\n";
  };
  if (r.gamma) row("gamma", num(*r.gamma, precision), "", "");
  if (r.bound_bits) row("bound_bits", num(*r.bound_bits, precision), "", "");
  for (const auto& [name, v] : r.values) row(name, num(v, precision), "", "");
  for (const auto& [name, c] : r.conditions) row(name, c.holds ? "holds" : "fails", num(c.lhs, precision), num(c.rhs, precision));
  for (const auto& [name, f] : r.flags) row(name, f ? "true" : "false", "", "");
  row("vacuous", r.vacuous ? "true" : "false", "", "");
  return out;
}

double thm3_gamma(double epsilon, double nu) {
  const double g = 1.0 - epsilon / 2.0 - nu;
  return g * g / (8.0 * 768.0);
}

BoundReport thm3_check(const Thm3Params& p) {
  require_open(p.epsilon, 0.0, 2.0, "epsilon");
  require_open(p.nu, 0.0, 1.0 - p.epsilon / 2.0, "nu");
  require_open(p.beta, 0.0, 1.0, "beta");
  require_count(p.k, "k");
  require_count(p.m, "m");
  require_count(p.n, "n");
  require_count(p.d, "d");
  if (!divides(p.k, p.m) || !divides(p.k, p.n)) throw Error(ErrorKind::invalid_parameter, "k must divide m and n");
  const double slack = 1.0 - p.epsilon / 2.0 - p.nu;
  const double gamma = thm3_gamma(p.epsilon, p.nu);
  BoundReport r;
  r.name = "thm3";
  r.gamma = gamma;
  const double k_rhs = 4.0 / slack;
  r.conditions["k"] = {p.k >= k_rhs, p.k, k_rhs};
  const double m1 = (3.0 / gamma) * std::log(std::exp(1.0) / (1.0 - p.beta));
  const double m2 = (3.0 / gamma) * std::log(p.k);
  const double m3 = 2.0 + (p.d / gamma) * std::log(16.0 / slack);
  const double m_rhs = std::max({m1, m2, m3});
  r.conditions["m"] = {p.m > m_rhs, p.m, m_rhs};
  const double n_rhs = 6.0 * p.k * p.d * p.d * p.m / (gamma * (1.0 - p.beta)) * std::log(8.0 * std::sqrt(p.d) / p.nu);
  r.conditions["n"] = {p.n > n_rhs, p.n, n_rhs};
  r.values["m_rhs_beta_term"] = m1;
  r.values["m_rhs_k_term"] = m2;
  r.values["m_rhs_d_term"] = m3;
  r.flags["all_conditions_hold"] = r.conditions["k"].holds && r.conditions["m"].holds && r.conditions["n"].holds;
  return r;
}

double cor5_bound(double epsilon, double m) {
  require_open(epsilon, 0.0, 1.0, "epsilon");
  const double inv = 1.0 / (1.0 - epsilon);
  return std::log2(m) - 2.0 * std::log2(inv) - std::log2(std::log(16.0 * inv)) - c2();
}

BoundReport cor5_report(double epsilon, double k, double m, double n) {
  require_open(epsilon, 0.0, 1.0, "epsilon");
  require_count(k, "k");
  require_count(m, "m");
  if (!(n >= 1.0)) throw Error(ErrorKind::invalid_parameter, "n must be at least 1");
  const double one_m = 1.0 - epsilon;
  BoundReport r;
  r.name = "cor5";
  r.bound_bits = cor5_bound(epsilon, m);
  r.vacuous = *r.bound_bits <= 0.0;
  r.conditions["k"] = {k >= 6.0 / one_m, k, 6.0 / one_m};
  const double m_rhs = kC1 * std::log(k) / (one_m * one_m);
  r.conditions["m"] = {m >= m_rhs, m, m_rhs};
  const double n_rhs = kC3 / (one_m * one_m) * k * m * m * m * std::log(16.0 * std::sqrt(m) / epsilon);
  r.conditions["n"] = {n >= n_rhs, n, n_rhs};
  r.values["c1"] = kC1;
  r.values["c2"] = c2();
  r.values["c3"] = kC3;
  return r;
}

BoundReport ent_lb_given_comm(double epsilon, double m, double comm_bits) {
  if (!(comm_bits >= 0.0)) throw Error(ErrorKind::invalid_parameter, "comm_bits must be nonnegative");
  require_count(m, "m");
  BoundReport r;
  r.name = "ent-lb";
  r.bound_bits = cor5_bound(epsilon, m) - comm_bits;
  r.vacuous = *r.bound_bits <= 0.0;
  r.values["cor5_bound"] = cor5_bound(epsilon, m);
  r.values["comm_bits"] = comm_bits;
  return r;
}

double prop6_cost(double k, double epsilon, double cc_const) {
  require_count(k, "k");
  require_open(epsilon, 0.0, 1.0, "epsilon");
  const double loglog = std::log2(std::log2(1.0 / epsilon));
  return 0.5 * std::log2(k) + cc_const * std::max(0.0, loglog);
}

BoundReport thm1_summary(double k, double m, double epsilon) {
  require_open(epsilon, 0.0, 1.0, "epsilon");
  require_count(k, "k");
  require_count(m, "m");
  const double one_m = 1.0 - epsilon;
  BoundReport r;
  r.name = "thm1";
  const double thm1 = std::log2(m) - 3.0 * std::log2(1.0 / one_m) - c2();
  const double cor5 = cor5_bound(epsilon, m);
  r.bound_bits = thm1;
  r.vacuous = thm1 <= 0.0;
  r.values["thm1_bound"] = thm1;
  r.values["cor5_bound"] = cor5;
  r.values["mutual_info"] = std::log2(k);
  r.values["max_info"] = std::log2(k);
  r.conditions["k"] = {k >= 6.0 / one_m, k, 6.0 / one_m};
  const double m_rhs = kC1 * std::log(k) / (one_m * one_m);
  r.conditions["m"] = {m >= m_rhs, m, m_rhs};
  r.conditions["k_divides_m"] = {divides(k, m), k, m};
  r.flags["thm1_le_cor5"] = thm1 <= cor5 + 1e-12;
  return r;
}

BoundReport constants_report() {
  BoundReport r;
  r.name = "constants";
  r.values["c1"] = kC1;
  r.values["c2"] = c2();
  r.values["c3"] = kC3;
  r.values["gamma_eps1_nu_quarter"] = thm3_gamma(1.0, 0.25);
  return r;
}

}  // namespace qcomp
