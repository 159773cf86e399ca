#pragma once

// Closed-form evaluation of the compression lower bounds, their side
// conditions, and the explicit proof constants. Everything is in bits.

#include <map>
#include <optional>
#include <string>

#include "qcomp/serialize.hpp"

namespace qcomp {

inline constexpr double kC1 = 24.0 * 768.0 + 1.0;             // 18433
inline constexpr double kC3 = 6.0 * 2.0 * 8.0 * 768.0 + 1.0;  // 73729
/// log2(16 * 768) = 12 + log2 3
double c2();

struct Condition {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct BoundReport {
  std::string name;
  std::optional<double> gamma;
  std::map<std::string, Condition> conditions;
  std::optional<double> bound_bits;
  bool vacuous = false;                 // bound_bits <= 0
  std::map<std::string, double> values;  // extra named quantities
  std::map<std::string, bool> flags;
};

Json to_json(const BoundReport& r);
/// Aligned text table (name, value / holds, lhs, rhs).
std::string to_table(const BoundReport& r, int precision);
std::string to_csv(const BoundReport& r, int precision);

struct Thm3Params {
  double epsilon = 0.0;  // (0, 2)
  double nu = 0.0;       // (0, 1 - eps/2)
  double beta = 0.0;     // (0, 1)
  double k = 0, m = 0, n = 0, d = 0;
};

/// (1 - eps/2 - nu)^2 / (8 * 768)
double thm3_gamma(double epsilon, double nu);

/// gamma and the k, m and n conditions. invalid-parameter on out-of-range
/// epsilon, nu or beta, or when k does not divide m and n.
BoundReport thm3_check(const Thm3Params& p);

/// log2 m - 2 log2(1/(1-eps)) - log2 ln(16/(1-eps)) - c2
double cor5_bound(double epsilon, double m);

/// Bound plus the conditions on k, m and n; eps in (0, 1).
BoundReport cor5_report(double epsilon, double k, double m, double n);

/// Cor5 bound minus the communication spent; flagged vacuous when <= 0.
BoundReport ent_lb_given_comm(double epsilon, double m, double comm_bits);

/// (1/2) log2 k + cc * log2 log2(1/eps), the second term clamped at 0.
double prop6_cost(double k, double epsilon, double cc_const);

/// log2 m - 3 log2(1/(1-eps)) - c2 next to the Cor5 value and log2 k.
/// Precondition failures are reported in `conditions`, not thrown.
BoundReport thm1_summary(double k, double m, double epsilon);

BoundReport constants_report();

}  // namespace qcomp
