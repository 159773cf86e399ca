#pragma once

// One-way compression protocols for visible ensembles: Alice knows the label x
// and sends a d-dimensional message; Bob applies a decoder and should end up
// with rho_x. Error is sum_x p_x ||rho_x - output_x||_1 (unhalved).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcomp/ensemble.hpp"

namespace qcomp {

struct UnassistedProtocol {
  std::size_t message_dim = 0;
  std::vector<DensityOperator> message_states;  // one per label, dim message_dim
  ChannelRep decoder = ChannelRep::identity(1);  // message_dim -> m

  /// Throws invalid-input on inconsistent dimensions.
  void validate() const;
};

// Shared pure state on E_A (x) E_B. For label x Alice applies the isometry
// V_x : E_A -> M (x) A_1 (message factor first) and sends M; Bob applies the
// decoder to M (x) E_B.
struct AssistedProtocol {
  PureState shared_state = PureState::from_amplitudes(Vector::Ones(1));  // index a * eb_dim + b
  std::size_t ea_dim = 0;
  std::size_t eb_dim = 0;
  std::size_t message_dim = 0;
  std::size_t junk_dim = 1;  // A_1
  std::vector<Matrix> encoders;  // (message_dim * junk_dim) x ea_dim
  ChannelRep decoder = ChannelRep::identity(1);  // (message_dim * eb_dim) -> m

  void validate() const;
};

struct CostReport {
  double comm_bits = 0.0;
  double ent_bits = 0.0;
  double sum_bits = 0.0;
};

Json to_json(const CostReport& c);

/// Materialized joint dimension limit for assisted simulation: m * d * eb_dim.
inline constexpr std::size_t kAssistedCap = 4096;

/// Decoder outputs, one per label.
std::vector<Matrix> protocol_outputs(const UnassistedProtocol& p);
std::vector<Matrix> protocol_outputs(const AssistedProtocol& p);

double average_error(const UnassistedProtocol& p, const CqState& tau);
double average_error(const AssistedProtocol& p, const CqState& tau);
double average_error(const UnassistedProtocol& p, const JrsEnsemble& e);
double average_error(const AssistedProtocol& p, const JrsEnsemble& e);

CostReport cost_report(const UnassistedProtocol& p);
/// Entanglement cost is log2 of the Schmidt rank (singular values >= 1e-10).
CostReport cost_report(const AssistedProtocol& p);

struct ConstantOutput {
  DensityOperator omega = DensityOperator::zero(1);
  double error = 0.0;
  double gap_bound = 0.0;
  bool converged = false;
};

/// The best d = 1 protocol: omega minimizing sum_x p_x ||rho_x - omega||_1.
ConstantOutput best_constant_output(const CqState& tau, double tol);

struct AttackOptions {
  std::size_t restarts = 4;
  int max_iters = 30;
  double tol = 1e-7;  // stop once a full iteration improves by less than this
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool pure_messages = false;
  int first_order_iters = 200;  // per channel step when the exact solver is too large
};

struct AttackResult {
  UnassistedProtocol protocol;
  double error = 0.0;          // recomputed from the returned protocol
  std::vector<double> trace;   // objective after each half-step of the best start
  bool converged = false;
  std::size_t best_start = 0;
  std::vector<std::vector<double>> traces;  // every start, in start order
  std::vector<std::string> start_labels;
};

/// Alternating minimization over message states and decoder. Starts, in order:
/// the optional warm start, the completely depolarizing decoder, then
/// `restarts` Haar-random isometric decoders (restart r on stream r). Each
/// half-step is kept only if it lowers the objective, so every trace is
/// non-increasing. The best start is chosen by (error, start index).
AttackResult attack_seesaw(const CqState& tau, std::size_t d, const AttackOptions& opts,
                           const UnassistedProtocol* warm_start = nullptr);

/// Attack at each d in `dims` (ascending), warm-starting every run from the
/// previous one padded to the new dimension.
std::vector<AttackResult> attack_sweep(const CqState& tau, const std::vector<std::size_t>& dims,
                                       const AttackOptions& opts);

/// Same protocol on a larger message space: messages embedded in the first
/// coordinates, new inputs mapped to the maximally mixed output.
UnassistedProtocol pad_protocol(const UnassistedProtocol& p, std::size_t d);

struct TrivialProtocol {
  std::string name;
  UnassistedProtocol protocol;
  CostReport cost;
  double error = 0.0;
};

/// send-state (d = m), send-index (d = n) and send-nothing (d = 1, best
/// constant output).
std::vector<TrivialProtocol> trivial_protocols(const JrsEnsemble& e);

Json channel_to_json(const ChannelRep& ch);
ChannelRep channel_from_json(const Json& j);
Json to_json(const UnassistedProtocol& p);
UnassistedProtocol unassisted_from_json(const Json& j);

}  // namespace qcomp
