#pragma once

// Block ensembles built from random orthonormal bases: for each basis B_i
// (i < groups) the columns are cut into k consecutive blocks of m/k vectors,
// and rho_ij = (k/m) M_ij with M_ij the projector onto block j. All n =
// groups * k states are equally likely. Index x = i * k + j.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qcomp/entropy.hpp"

namespace qcomp {

struct EnsembleParams {
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t groups = 0;
  std::uint64_t seed = 0;

  std::size_t n() const { return groups * k; }
  std::size_t block() const { return m / k; }
  /// Throws invalid-parameter unless m, k, groups >= 1 and k divides m.
  void validate() const;
};

class JrsEnsemble {
 public:
  /// Validates the bases (unitary to 1e-10); validation-error otherwise.
  JrsEnsemble(EnsembleParams params, std::vector<Matrix> bases);

  const EnsembleParams& params() const { return params_; }
  const std::vector<Matrix>& bases() const { return bases_; }
  std::size_t size() const { return params_.n(); }

  /// Projector M_ij.
  Matrix block_projector(std::size_t i, std::size_t j) const;
  DensityOperator state(std::size_t i, std::size_t j) const;
  /// All n states in index order.
  std::vector<DensityOperator> states() const;

 private:
  EnsembleParams params_;
  std::vector<Matrix> bases_;
};

/// Basis i is drawn from stream i of the seed, so bases can be generated in
/// any order.
JrsEnsemble generate_jrs(const EnsembleParams& params);

/// (1/n) sum rho_ij; validation-error if it differs from 1/m by more than 1e-10.
DensityOperator ensemble_average(const JrsEnsemble& e);

CqState to_cq_state(const JrsEnsemble& e);

/// (1/2) I(X:M) of the prepare-and-send protocol.
double qic_prepare_send(const JrsEnsemble& e);
double qic_prepare_send(const CqState& tau);

/// sigma' = (k/m) 1 and Y_ij = (k/n) M_ij; optimal with value log2 k.
ImaxCertificate jrs_analytic_certificate(const JrsEnsemble& e);

enum class EnsembleFormat { json, binary };

Json to_json(const JrsEnsemble& e);
JrsEnsemble ensemble_from_json(const Json& j);

void save(const JrsEnsemble& e, const std::filesystem::path& path, EnsembleFormat format);
/// Format is detected from the first non-blank byte ('{' means JSON).
JrsEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace qcomp
