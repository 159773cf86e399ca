#pragma once

#include "qcomp/qcore.hpp"
#include "qcomp/serialize.hpp"

namespace qcomp {

/// Sum of singular values.
double trace_norm(const Matrix& m);

/// Unhalved trace distance ||rho - sigma||_1, in [0, 2]. This is the error
/// convention used throughout the library.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

/// (1/2)||rho - sigma||_1, in [0, 1]. Kept under a separate name on purpose.
double half_trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

/// Tr sqrt(sqrt(rho) sigma sqrt(rho)) + sqrt((1 - Tr rho)(1 - Tr sigma)).
/// Valid for sub-normalized arguments.
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

/// sqrt(1 - F^2)
double purified_distance(const DensityOperator& rho, const DensityOperator& sigma);

struct DistanceReport {
  double trace_distance = 0.0;  // unhalved
  double fidelity = 0.0;
  double purified_distance = 0.0;
};

DistanceReport distance_report(const DensityOperator& rho, const DensityOperator& sigma);
Json to_json(const DistanceReport& r);

struct HelstromResult {
  double value = 0.0;  // ||rho - sigma||_1
  Matrix optimal_measurement;  // projector onto the nonnegative eigenspace of rho - sigma
};

/// Optimal two-outcome discrimination: 2|Tr M(rho - sigma)| attains the trace norm.
HelstromResult helstrom(const DensityOperator& rho, const DensityOperator& sigma);

struct FvdgSandwich {
  double lower = 0.0;  // 1 - sqrt(1 - P^2) = 1 - F
  double mid = 0.0;    // (1/2)||rho - sigma||_1
  double upper = 0.0;  // P
  bool holds = false;  // ordering holds with slack >= -1e-9
};

/// Fuchs-van de Graaf inequalities for normalized states.
FvdgSandwich fvdg_sandwich(const DensityOperator& rho, const DensityOperator& sigma);

}  // namespace qcomp
