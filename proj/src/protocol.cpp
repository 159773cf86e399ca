#include "qcomp/protocol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "qcomp/fitting.hpp"
#include "qcomp/metrics.hpp"
#include "qcomp/parallel.hpp"

namespace qcomp {

void UnassistedProtocol::validate() const {
  if (message_dim == 0 || decoder.in_dim() != message_dim) {
    throw Error(ErrorKind::invalid_input, "protocol: decoder input dimension differs from message dimension");
  }
  for (const auto& s : message_states) {
    if (s.dim() != message_dim) throw Error(ErrorKind::invalid_input, "protocol: message state has wrong dimension");
  }
}

void AssistedProtocol::validate() const {
  if (shared_state.dim() != ea_dim * eb_dim) throw Error(ErrorKind::invalid_input, "assisted protocol: shared state dimension");
  if (decoder.in_dim() != message_dim * eb_dim) throw Error(ErrorKind::invalid_input, "assisted protocol: decoder input dimension");
  const auto rows = static_cast<Index>(message_dim * junk_dim);
  const auto cols = static_cast<Index>(ea_dim);
  for (const auto& v : encoders) {
    if (v.rows() != rows || v.cols() != cols) throw Error(ErrorKind::invalid_input, "assisted protocol: encoder shape");
    if (max_abs_diff(v.adjoint() * v, Matrix::Identity(cols, cols)) > kChannelTol) {
      throw Error(ErrorKind::invalid_input, "assisted protocol: encoder is not an isometry");
    }
  }
  const std::size_t m = decoder.out_dim();
  if (m * message_dim * eb_dim > kAssistedCap || message_dim * junk_dim * eb_dim > kAssistedCap) {
    throw Error(ErrorKind::infeasible_scale, "assisted protocol: joint state exceeds " + std::to_string(kAssistedCap) + " dimensions");
  }
}

Json to_json(const CostReport& c) {
  return Json{{"comm_bits", c.comm_bits}, {"ent_bits", c.ent_bits}, {"sum_bits", c.sum_bits}};
}

std::vector<Matrix> protocol_outputs(const UnassistedProtocol& p) {
  p.validate();
  std::vector<Matrix> out;
  out.reserve(p.message_states.size());
  for (const auto& s : p.message_states) out.push_back(channel_apply(p.decoder, s.matrix()));
  return out;
}

std::vector<Matrix> protocol_outputs(const AssistedProtocol& p) {
  p.validate();
  const auto eb = static_cast<Index>(p.eb_dim);
  const auto ea = static_cast<Index>(p.ea_dim);
  // psi as an ea x eb coefficient matrix
  Matrix psi(ea, eb);
  for (Index a = 0; a < ea; ++a) {
    for (Index b = 0; b < eb; ++b) psi(a, b) = p.shared_state.amplitudes()(a * eb + b);
  }
  const std::array<std::size_t, 3> dims{p.message_dim, p.junk_dim, p.eb_dim};
  std::vector<Matrix> out;
  out.reserve(p.encoders.size());
  for (const auto& v : p.encoders) {
    const Matrix coeff = v * psi;  // (M A_1) x E_B
    const Vector joint = Eigen::Map<const Vector>(Matrix(coeff.transpose()).data(), coeff.size());
    const Matrix rho = joint * joint.adjoint();
    out.push_back(channel_apply(p.decoder, partial_trace(rho, dims, std::size_t{1})));
  }
  return out;
}

namespace {

double error_of_outputs(const CqState& tau, const std::vector<Matrix>& outputs) {
  if (outputs.size() != tau.size()) throw Error(ErrorKind::invalid_input, "protocol: one message per label required");
  double total = 0.0;
  for (std::size_t x = 0; x < tau.size(); ++x) {
    if (outputs[x].rows() != static_cast<Index>(tau.dim())) throw Error(ErrorKind::invalid_input, "protocol: output dimension differs from ensemble");
    total += tau.probs()[x] * trace_norm(tau.states()[x].matrix() - outputs[x]);
  }
  return total;
}

}  // namespace

double average_error(const UnassistedProtocol& p, const CqState& tau) { return error_of_outputs(tau, protocol_outputs(p)); }
double average_error(const AssistedProtocol& p, const CqState& tau) { return error_of_outputs(tau, protocol_outputs(p)); }
double average_error(const UnassistedProtocol& p, const JrsEnsemble& e) { return average_error(p, to_cq_state(e)); }
double average_error(const AssistedProtocol& p, const JrsEnsemble& e) { return average_error(p, to_cq_state(e)); }

CostReport cost_report(const UnassistedProtocol& p) {
  CostReport c;
  c.comm_bits = std::log2(static_cast<double>(p.message_dim));
  c.sum_bits = c.comm_bits;
  return c;
}

CostReport cost_report(const AssistedProtocol& p) {
  const auto ea = static_cast<Index>(p.ea_dim);
  const auto eb = static_cast<Index>(p.eb_dim);
  Matrix psi(ea, eb);
  for (Index a = 0; a < ea; ++a) {
    for (Index b = 0; b < eb; ++b) psi(a, b) = p.shared_state.amplitudes()(a * eb + b);
  }
  const RealVector sv = Eigen::JacobiSVD<Matrix>(psi).singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) rank += sv(i) >= 1e-10 ? 1 : 0;
  CostReport c;
  c.comm_bits = std::log2(static_cast<double>(p.message_dim));
  c.ent_bits = std::log2(static_cast<double>(std::max<Index>(rank, 1)));
  c.sum_bits = c.comm_bits + c.ent_bits;
  return c;
}

// ---------------------------------------------------------------------------

ConstantOutput best_constant_output(const CqState& tau, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::invalid_parameter, "best_constant_output: tol must be positive");
  const auto m = static_cast<Index>(tau.dim());
  std::vector<std::size_t> active;
  for (std::size_t x = 0; x < tau.size(); ++x) {
    if (tau.probs()[x] > 0.0) active.push_back(x);
  }
  if (active.size() == 1) {
    return ConstantOutput{tau.states()[active.front()], 0.0, 0.0, true};
  }
  TraceFitProblem p;
  p.x_dim = m;
  for (std::size_t x : active) {
    p.targets.push_back(tau.states()[x].matrix());
    p.weights.push_back(tau.probs()[x]);
    p.maps.emplace_back(std::nullopt);
  }
  p.eq_a = lmi::herm_to_vec(Matrix::Identity(m, m)).transpose();
  p.eq_b = RealVector::Ones(1);
  p.start = Matrix::Identity(m, m) / static_cast<double>(m);
  lmi::Options opts;
  opts.gap_tol = tol;
  const auto fit = fit_trace_norm(p, opts);
  Matrix omega = hermitian_function(fit.x, [](double v) { return std::max(v, 0.0); });
  omega /= omega.trace().real();
  ConstantOutput out{DensityOperator::from_matrix(omega), 0.0, fit.gap_bound, fit.converged};
  out.error = error_of_outputs(tau, std::vector<Matrix>(tau.size(), omega));
  return out;
}

// ---------------------------------------------------------------------------
// See-saw attack

namespace {

// Largest Choi dimension (m * d) handled by the exact channel step.
constexpr std::size_t kExactChoiLimit = 8;

struct SeesawState {
  Matrix choi;                 // (m d) x (m d)
  std::vector<Matrix> sigmas;  // d x d
};

struct SeesawRun {
  SeesawState state;
  std::vector<double> trace;
  bool converged = false;
};

Matrix sanitize_state(const Matrix& s) {
  Matrix c = hermitian_function(hermitian_part(s), [](double v) { return std::max(v, 0.0); });
  const double tr = c.trace().real();
  return tr > 0.0 ? Matrix(c / tr) : Matrix(Matrix::Identity(s.rows(), s.cols()) / static_cast<double>(s.rows()));
}

class Seesaw {
 public:
  Seesaw(const CqState& tau, std::size_t d, const AttackOptions& opts) : tau_(tau), d_(d), m_(tau.dim()), opts_(opts) {
    choi_trace_constraint(d_, m_, eq_a_, eq_b_);
  }

  double term(const SeesawState& s, std::size_t x) const {
    return tau_.probs()[x] * trace_norm(tau_.states()[x].matrix() - apply_choi(s.choi, d_, m_, s.sigmas[x]));
  }

  double objective(const SeesawState& s) const {
    double total = 0.0;
    for (std::size_t x = 0; x < tau_.size(); ++x) total += term(s, x);
    return total;
  }

  void message_step(SeesawState& s) const {
    if (d_ == 1) return;
    const auto d = static_cast<Index>(d_);
    const auto m = static_cast<Index>(m_);
    const lmi::RealMatrix g = lmi::linear_map_matrix(d, m, [&](const Matrix& x) { return apply_choi(s.choi, d_, m_, x); });
    lmi::Options lo;
    lo.gap_tol = 1e-10;
    for (std::size_t x = 0; x < tau_.size(); ++x) {
      if (tau_.probs()[x] == 0.0) continue;
      TraceFitProblem p;
      p.x_dim = d;
      p.targets = {tau_.states()[x].matrix()};
      p.weights = {1.0};
      p.maps = {g};
      p.eq_a = lmi::herm_to_vec(Matrix::Identity(d, d)).transpose();
      p.eq_b = RealVector::Ones(1);
      p.start = Matrix::Identity(d, d) / static_cast<double>(d);
      Matrix cand = sanitize_state(fit_trace_norm(p, lo).x);
      if (opts_.pure_messages) {
        const auto eig = hermitian_eig(cand);
        const Vector top = eig.vectors.col(d - 1);
        cand = top * top.adjoint();
      }
      const double before = term(s, x);
      std::swap(s.sigmas[x], cand);
      if (!(term(s, x) < before)) std::swap(s.sigmas[x], cand);
    }
  }

  void channel_step(SeesawState& s) const {
    const double before = objective(s);
    Matrix cand;
    if (m_ * d_ <= kExactChoiLimit) {
      const auto big = static_cast<Index>(m_ * d_);
      TraceFitProblem p;
      p.x_dim = big;
      for (std::size_t x = 0; x < tau_.size(); ++x) {
        if (tau_.probs()[x] == 0.0) continue;
        p.targets.push_back(tau_.states()[x].matrix());
        p.weights.push_back(tau_.probs()[x]);
        p.maps.emplace_back(choi_action_matrix(s.sigmas[x], d_, m_));
      }
      p.eq_a = eq_a_;
      p.eq_b = eq_b_;
      p.start = 0.5 * s.choi + 0.5 * Matrix::Identity(big, big) / static_cast<double>(m_);
      lmi::Options lo;
      lo.gap_tol = 1e-9;
      cand = repair_choi(fit_trace_norm(p, lo).x, d_, m_);
    } else {
      std::vector<Matrix> targets, inputs;
      std::vector<double> weights;
      for (std::size_t x = 0; x < tau_.size(); ++x) {
        targets.push_back(tau_.states()[x].matrix());
        inputs.push_back(s.sigmas[x]);
        weights.push_back(tau_.probs()[x]);
      }
      cand = fit_channel_first_order(targets, weights, inputs, d_, m_, s.choi, opts_.first_order_iters).choi;
    }
    std::swap(s.choi, cand);
    if (!(objective(s) < before)) std::swap(s.choi, cand);
  }

  SeesawRun run(SeesawState s) const {
    SeesawRun r;
    double current = objective(s);
    r.trace.push_back(current);
    for (int it = 0; it < opts_.max_iters; ++it) {
      const double start = current;
      message_step(s);
      current = objective(s);
      r.trace.push_back(current);
      channel_step(s);
      current = objective(s);
      r.trace.push_back(current);
      if (start - current <= opts_.tol || current <= 1e-12) {
        r.converged = true;
        break;
      }
    }
    r.state = std::move(s);
    return r;
  }

 private:
  const CqState& tau_;
  std::size_t d_;
  std::size_t m_;
  AttackOptions opts_;
  lmi::RealMatrix eq_a_;
  RealVector eq_b_;
};

UnassistedProtocol to_protocol(const SeesawState& s, std::size_t d, std::size_t m) {
  UnassistedProtocol p;
  p.message_dim = d;
  for (const auto& sigma : s.sigmas) p.message_states.push_back(DensityOperator::from_matrix(sigma));
  p.decoder = ChannelRep::from_choi(s.choi, d, m);
  return p;
}

}  // namespace

UnassistedProtocol pad_protocol(const UnassistedProtocol& p, std::size_t d) {
  p.validate();
  const std::size_t d0 = p.message_dim;
  if (d < d0) throw Error(ErrorKind::invalid_parameter, "pad_protocol: target dimension is smaller");
  const std::size_t m = p.decoder.out_dim();
  const Matrix j0 = choi_matrix(p.decoder);
  const auto md = static_cast<Index>(m * d);
  Matrix j = Matrix::Zero(md, md);
  const auto dd = static_cast<Index>(d);
  const auto dd0 = static_cast<Index>(d0);
  for (Index a = 0; a < static_cast<Index>(m); ++a) {
    for (Index b = 0; b < static_cast<Index>(m); ++b) {
      j.block(a * dd, b * dd, dd0, dd0) = j0.block(a * dd0, b * dd0, dd0, dd0);
      if (a == b) {
        for (Index i = dd0; i < dd; ++i) j(a * dd + i, b * dd + i) = 1.0 / static_cast<double>(m);
      }
    }
  }
  UnassistedProtocol out;
  out.message_dim = d;
  for (const auto& s : p.message_states) {
    Matrix big = Matrix::Zero(dd, dd);
    big.topLeftCorner(dd0, dd0) = s.matrix();
    out.message_states.push_back(DensityOperator::from_matrix(big));
  }
  out.decoder = ChannelRep::from_choi(j, d, m);
  return out;
}

AttackResult attack_seesaw(const CqState& tau, std::size_t d, const AttackOptions& opts,
                           const UnassistedProtocol* warm_start) {
  if (d < 1) throw Error(ErrorKind::invalid_parameter, "attack: message dimension must be at least 1");
  const std::size_t m = tau.dim();
  const std::size_t n = tau.size();
  if (m * d > 256) throw Error(ErrorKind::infeasible_scale, "attack: m * d above 256 is out of desk scale");
  const auto dd = static_cast<Index>(d);
  const Matrix mixed_msg = Matrix::Identity(dd, dd) / static_cast<double>(d);

  std::vector<std::string> labels;
  std::vector<std::function<SeesawState()>> makers;
  if (warm_start) {
    if (warm_start->message_dim != d || warm_start->decoder.out_dim() != m || warm_start->message_states.size() != n) {
      throw Error(ErrorKind::invalid_input, "attack: warm start does not match the problem dimensions");
    }
    labels.emplace_back("warm");
    makers.emplace_back([&] {
      SeesawState s;
      s.choi = choi_matrix(warm_start->decoder);
      for (const auto& st : warm_start->message_states) s.sigmas.push_back(st.matrix());
      return s;
    });
  }
  labels.emplace_back("depolarizing");
  makers.emplace_back([&] {
    const auto mm = static_cast<Index>(m);
    return SeesawState{choi_matrix(ChannelRep::replacement(d, Matrix::Identity(mm, mm) / static_cast<double>(m))),
                       std::vector<Matrix>(n, mixed_msg)};
  });
  const std::size_t env = (d + m - 1) / m;
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    labels.push_back("haar-" + std::to_string(r));
    makers.emplace_back([&, r] {
      const Matrix u = haar_unitary(m * env, RngSeed{opts.seed, r});
      const ChannelRep ch = ChannelRep::from_stinespring(u.leftCols(dd), env);
      return SeesawState{choi_matrix(ch), std::vector<Matrix>(n, mixed_msg)};
    });
  }

  const Seesaw engine(tau, d, opts);
  std::vector<SeesawRun> runs(makers.size());
  parallel_for(makers.size(), opts.threads, [&](std::size_t i) { runs[i] = engine.run(makers[i]()); });

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].trace.back() < runs[best].trace.back()) best = i;
  }
  AttackResult res;
  res.protocol = to_protocol(runs[best].state, d, m);
  res.error = average_error(res.protocol, tau);
  res.trace = runs[best].trace;
  res.converged = runs[best].converged;
  res.best_start = best;
  res.start_labels = std::move(labels);
  for (auto& r : runs) res.traces.push_back(std::move(r.trace));
  return res;
}

std::vector<AttackResult> attack_sweep(const CqState& tau, const std::vector<std::size_t>& dims, const AttackOptions& opts) {
  std::vector<AttackResult> out;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i > 0 && dims[i] < dims[i - 1]) throw Error(ErrorKind::invalid_parameter, "attack sweep: dimensions must ascend");
    if (out.empty()) {
      out.push_back(attack_seesaw(tau, dims[i], opts));
    } else {
      const UnassistedProtocol warm = pad_protocol(out.back().protocol, dims[i]);
      out.push_back(attack_seesaw(tau, dims[i], opts, &warm));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<TrivialProtocol> trivial_protocols(const JrsEnsemble& e) {
  const CqState tau = to_cq_state(e);
  const std::size_t m = e.params().m;
  const std::size_t n = e.size();
  std::vector<TrivialProtocol> out;

  UnassistedProtocol send_state;
  send_state.message_dim = m;
  send_state.message_states = tau.states();
  send_state.decoder = ChannelRep::identity(m);
  out.push_back({"send-state", send_state, cost_report(send_state), average_error(send_state, tau)});

  // Measure the label and prepare rho_x: J = sum_x rho_x (x) |x><x|.
  UnassistedProtocol send_index;
  send_index.message_dim = n;
  const auto nn = static_cast<Index>(n);
  Matrix j = Matrix::Zero(static_cast<Index>(m) * nn, static_cast<Index>(m) * nn);
  for (std::size_t x = 0; x < n; ++x) {
    Matrix proj = Matrix::Zero(nn, nn);
    proj(static_cast<Index>(x), static_cast<Index>(x)) = 1.0;
    j += tensor(tau.states()[x].matrix(), proj);
    send_index.message_states.push_back(DensityOperator::from_matrix(proj));
  }
  send_index.decoder = ChannelRep::from_choi(j, n, m);
  out.push_back({"send-index", send_index, cost_report(send_index), average_error(send_index, tau)});

  const ConstantOutput best = best_constant_output(tau, 1e-9);
  UnassistedProtocol nothing;
  nothing.message_dim = 1;
  nothing.message_states.assign(n, DensityOperator::from_matrix(Matrix::Ones(1, 1)));
  nothing.decoder = ChannelRep::replacement(1, best.omega.matrix());
  out.push_back({"send-nothing", nothing, cost_report(nothing), average_error(nothing, tau)});
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

Json channel_to_json(const ChannelRep& ch) {
  Json j{{"kind", std::string(to_string(ch.kind()))}, {"in_dim", ch.in_dim()}, {"out_dim", ch.out_dim()}};
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, KrausBody>) {
          Json ops = Json::array();
          for (const auto& k : body.ops) ops.push_back(matrix_to_json(k));
          j["kraus"] = ops;
        } else if constexpr (std::is_same_v<T, ChoiBody>) {
          j["choi"] = matrix_to_json(body.choi);
        } else {
          j["isometry"] = matrix_to_json(body.isometry);
          j["env_dim"] = body.env_dim;
        }
      },
      ch.body());
  return j;
}

ChannelRep channel_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw Error(ErrorKind::parse_error, "channel: missing 'kind'");
  }
  ChannelKind kind;
  try {
    kind = channel_kind_from_string(j.at("kind").get<std::string>());
  } catch (const Error& e) {
    throw Error(ErrorKind::parse_error, std::string("channel: ") + e.what());
  }
  auto count = [&](const char* key) -> std::size_t {
    if (!j.contains(key) || !j.at(key).is_number_unsigned()) throw Error(ErrorKind::parse_error, std::string("channel: bad '") + key + "'");
    return j.at(key).get<std::size_t>();
  };
  try {
    switch (kind) {
      case ChannelKind::kraus: {
        if (!j.contains("kraus") || !j.at("kraus").is_array()) throw Error(ErrorKind::parse_error, "channel: bad 'kraus'");
        std::vector<Matrix> ops;
        for (std::size_t i = 0; i < j.at("kraus").size(); ++i) ops.push_back(matrix_from_json(j.at("kraus")[i], "kraus[" + std::to_string(i) + "]"));
        return ChannelRep::from_kraus(std::move(ops));
      }
      case ChannelKind::choi:
        if (!j.contains("choi")) throw Error(ErrorKind::parse_error, "channel: missing 'choi'");
        return ChannelRep::from_choi(matrix_from_json(j.at("choi"), "choi"), count("in_dim"), count("out_dim"));
      case ChannelKind::stinespring:
        if (!j.contains("isometry")) throw Error(ErrorKind::parse_error, "channel: missing 'isometry'");
        return ChannelRep::from_stinespring(matrix_from_json(j.at("isometry"), "isometry"), count("env_dim"));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_input) throw Error(ErrorKind::validation_error, e.what());
    throw;
  }
  throw Error(ErrorKind::parse_error, "channel: unknown kind");
}

Json to_json(const UnassistedProtocol& p) {
  Json states = Json::array();
  for (const auto& s : p.message_states) states.push_back(matrix_to_json(s.matrix()));
  return Json{{"message_dim", p.message_dim}, {"message_states", states}, {"decoder", channel_to_json(p.decoder)}};
}

UnassistedProtocol unassisted_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("message_dim") || !j.contains("message_states") || !j.contains("decoder")) {
    throw Error(ErrorKind::parse_error, "protocol: expected message_dim, message_states, decoder");
  }
  UnassistedProtocol p;
  if (!j.at("message_dim").is_number_unsigned()) throw Error(ErrorKind::parse_error, "protocol: bad message_dim");
  p.message_dim = j.at("message_dim").get<std::size_t>();
  const auto& arr = j.at("message_states");
  if (!arr.is_array()) throw Error(ErrorKind::parse_error, "protocol: message_states must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Matrix m = matrix_from_json(arr[i], "message_states[" + std::to_string(i) + "]");
    try {
      p.message_states.push_back(DensityOperator::from_matrix(m));
    } catch (const Error& e) {
      throw Error(ErrorKind::validation_error, e.what());
    }
  }
  p.decoder = channel_from_json(j.at("decoder"));
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::validation_error, e.what());
  }
  return p;
}

}  // namespace qcomp
