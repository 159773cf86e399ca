#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcomp/bounds.hpp"
#include "qcomp/concentration.hpp"
#include "qcomp/ensemble.hpp"
#include "qcomp/metrics.hpp"
#include "qcomp/nets.hpp"
#include "qcomp/protocol.hpp"

namespace qcomp::cli {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation_error: return kValidationFailure;
    case ErrorKind::infeasible_scale: return kInfeasibleScale;
    case ErrorKind::convergence_failure: return kConvergenceFailure;
    default: return kInvalidInput;
  }
}

Json round_json(const Json& j, int digits) {
  if (j.is_number_float()) return round_sig(j.get<double>(), digits);
  if (j.is_array() || j.is_object()) {
    Json r = j;
    for (auto& v : r) v = round_json(v, digits);
    return r;
  }
  return j;
}

namespace {

constexpr const char* kThreadsEnv = "ONESHOT_QCOMP_THREADS";

struct Common {
  std::string format = "json";
  int precision = 12;
  std::string out;
  std::size_t threads = 1;
};

std::size_t default_threads() {
  const char* env = std::getenv(kThreadsEnv);
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw Error(ErrorKind::invalid_parameter, std::string(kThreadsEnv) + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

std::string fmt(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

// key,value rows with nested keys joined by '.'
void flatten(const Json& j, const std::string& prefix, int precision, std::string& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), precision, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), precision, out);
  } else if (j.is_number_float()) {
    out += prefix + "," + fmt(j.get<double>(), precision) + "\n";
  } else if (j.is_string()) {
    out += prefix + "," + j.get<std::string>() + "\n";
  } else {
    out += prefix + "," + j.dump() + "\n";
  }
}

std::string render(const Json& report, const Common& c) {
  if (c.format == "csv") {
    std::string out = "key,value\n";
    flatten(report, "", c.precision, out);
    return out;
  }
  return dump_canonical(round_json(report, c.precision));
}

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::invalid_input, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error(ErrorKind::invalid_input, "failed writing '" + path + "'");
}

void add_common(CLI::App* sub, Common& c, bool table = false, bool out_option = true) {
  std::vector<std::string> formats{"json", "csv"};
  if (table) formats.push_back("table");
  sub->add_option("--format", c.format, "report format")->check(CLI::IsMember(formats))->capture_default_str();
  sub->add_option("--precision", c.precision, "significant digits in reports")->check(CLI::Range(1, 17))->capture_default_str();
  if (out_option) sub->add_option("--out", c.out, "report path (default: stdout)");
  sub->add_option("--threads", c.threads, "worker threads (default: $" + std::string(kThreadsEnv) + " or 1)")
      ->check(CLI::PositiveNumber);
}

Json params_json(const EnsembleParams& p) {
  return Json{{"m", p.m}, {"k", p.k}, {"groups", p.groups}, {"seed", p.seed}};
}

// ---------------------------------------------------------------------------

struct GenArgs {
  EnsembleParams params;
  std::string file;
  std::string encoding = "json";
};

int cmd_gen_ensemble(const GenArgs& a, const Common& c, std::ostream& out) {
  a.params.validate();
  const JrsEnsemble e = generate_jrs(a.params);
  const Matrix avg = ensemble_average(e).matrix();
  const double dev = (avg - Matrix::Identity(avg.rows(), avg.cols()) / static_cast<double>(a.params.m)).norm();
  save(e, a.file, a.encoding == "binary" ? EnsembleFormat::binary : EnsembleFormat::json);
  Json summary = params_json(a.params);
  summary["n"] = a.params.n();
  summary["avg_check"] = "pass";
  summary["avg_deviation"] = dev;
  summary["file"] = a.file;
  summary["encoding"] = a.encoding;
  write_text(render(summary, c), c.out, out);
  return kOk;
}

struct EntropyArgs {
  std::string ensemble;
  std::string cert;
  double tol = 1e-4;
};

int cmd_entropies(const EntropyArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const JrsEnsemble e = load_ensemble(a.ensemble);
  const CqState tau = to_cq_state(e);
  const DensityOperator avg = ensemble_average(e);
  Json states = Json::array();
  for (std::size_t x = 0; x < tau.size(); ++x) {
    const DensityOperator& rho = tau.states()[x];
    states.push_back(Json{{"x", x},
                          {"entropy", von_neumann(rho)},
                          {"min_entropy", min_entropy(rho)},
                          {"rel_entropy_to_avg", relative_entropy(rho, avg)},
                          {"max_rel_entropy_to_avg", max_relative_entropy(rho, avg)}});
  }
  int code = kOk;
  ImaxCertificate cert;
  try {
    cert = imax_cq(tau, a.tol);
  } catch (const ImaxNotConverged& ex) {
    cert = ex.best();
    err << ex.what() << "\n";
    code = kConvergenceFailure;
  }
  Json report{{"ensemble", params_json(e.params())},
              {"states", states},
              {"mutual_info", mutual_info_cq(tau)},
              {"max_info", cert.value},
              {"max_info_gap", cert.gap},
              {"max_info_converged", code == kOk},
              {"qic", qic_prepare_send(tau)},
              {"certificate", a.cert.empty() ? Json(nullptr) : Json(a.cert)}};
  if (!a.cert.empty()) write_text(dump_canonical(to_json(cert)), a.cert, out);
  write_text(render(report, c), c.out, out);
  return code;
}

struct VerifyArgs {
  std::string ensemble;
  std::string cert;
  double tol = 1e-3;
};

int cmd_verify_cert(const VerifyArgs& a, const Common& c, std::ostream& out) {
  const JrsEnsemble e = load_ensemble(a.ensemble);
  std::ifstream f(a.cert, std::ios::binary);
  if (!f) throw Error(ErrorKind::invalid_input, "cannot open '" + a.cert + "'");
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::parse_error, a.cert + ": " + ex.what());
  }
  const ImaxCertificate cert = imax_certificate_from_json(j);
  const CqState tau = to_cq_state(e);
  if (cert.dual_ops.size() != tau.size() || static_cast<std::size_t>(cert.primal_sigma.rows()) != tau.dim()) {
    throw Error(ErrorKind::validation_error, "certificate does not match the ensemble dimensions");
  }
  const CertificateCheck chk = verify_imax_certificate(tau, cert, a.tol);
  Json report{{"value", cert.value},
              {"primal_bits", chk.primal_bits},
              {"dual_bits", chk.dual_bits},
              {"gap", chk.primal_bits - chk.dual_bits},
              {"min_primal_slack", chk.min_primal_slack},
              {"min_dual_eig", chk.min_dual_eig},
              {"min_sum_slack", chk.min_sum_slack},
              {"tol", a.tol},
              {"passes", chk.passes}};
  write_text(render(report, c), c.out, out);
  return chk.passes ? kOk : kValidationFailure;
}

struct ConcArgs {
  Lemma2Params params;
  std::size_t pairs = 0;
  std::string csv;
};

int cmd_conc_test(const ConcArgs& a, const Common& c, std::ostream& out) {
  const Lemma2Params& p = a.params;
  p.validate();
  // W = span of the first d coordinate vectors of C^m (x) C^p
  const Subspace w = Subspace::canonical(p.m * p.p, p.d);
  const TailReport rep = lemma2_experiment(p, w, c.threads);
  const SideCondition cond = lemma2_condition(p);
  Json summary = to_json(rep);
  summary["params"] = Json{{"m", p.m}, {"p", p.p}, {"d", p.d}, {"l", p.l}, {"alpha", p.alpha}, {"trials", p.trials}, {"seed", p.seed}};
  summary["condition"] = Json{{"holds", cond.holds}, {"lhs", cond.lhs}, {"rhs", cond.rhs}};
  summary["tail_within_bound"] = rep.empirical_tail <= rep.theoretical_bound;
  if (a.pairs > 0) {
    const LipschitzProbe probe = lipschitz_probe(p.m, p.p, w, p.l, a.pairs, RngSeed{p.seed, 1ULL << 32}, c.threads);
    summary["lipschitz"] = Json{{"max_ratio", probe.max_ratio}, {"pairs_used", probe.pairs_used}, {"constant", 2.0}};
  }
  const std::string trials_csv = to_csv(rep, c.precision);
  if (!a.csv.empty()) write_text(trials_csv, a.csv, out);
  write_text(c.format == "csv" ? trials_csv : dump_canonical(round_json(summary, c.precision)), c.out, out);
  return kOk;
}

struct AttackArgs {
  std::string ensemble;
  std::vector<std::size_t> dims;
  AttackOptions opts;
  bool verify = false;
};

// Error of a protocol read back from its serialized form, with outputs built
// from Kraus operators and trace norms from singular values.
double reverify_error(const Json& protocol_json, const CqState& tau) {
  const UnassistedProtocol p = unassisted_from_json(Json::parse(protocol_json.dump()));
  const std::vector<Matrix> kraus = kraus_operators(p.decoder);
  double total = 0.0;
  for (std::size_t x = 0; x < tau.size(); ++x) {
    Matrix o = Matrix::Zero(static_cast<Index>(tau.dim()), static_cast<Index>(tau.dim()));
    for (const Matrix& k : kraus) o += k * p.message_states[x].matrix() * k.adjoint();
    const Matrix diff = tau.states()[x].matrix() - o;
    total += tau.probs()[x] * Eigen::JacobiSVD<Matrix>(diff).singularValues().sum();
  }
  return total;
}

int cmd_attack(AttackArgs a, const Common& c, std::ostream& out) {
  const JrsEnsemble e = load_ensemble(a.ensemble);
  const CqState tau = to_cq_state(e);
  a.opts.threads = c.threads;
  const std::vector<AttackResult> runs = attack_sweep(tau, a.dims, a.opts);
  Json params{{"ensemble", params_json(e.params())},
              {"restarts", a.opts.restarts},
              {"max_iters", a.opts.max_iters},
              {"tol", a.opts.tol},
              {"pure_messages", a.opts.pure_messages},
              {"first_order_iters", a.opts.first_order_iters}};
  bool verified = true;
  Json run_list = Json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const AttackResult& r = runs[i];
    Json run{{"d", a.dims[i]},
             {"best_error", r.error},
             {"trace", r.trace},
             {"converged", r.converged},
             {"best_start", r.start_labels.at(r.best_start)},
             {"cost", to_json(cost_report(r.protocol))},
             {"protocol", round_json(to_json(r.protocol), c.precision)}};
    if (a.verify) {
      const double again = reverify_error(run["protocol"], tau);
      const bool ok = std::abs(again - r.error) <= 1e-8;
      run["verified_error"] = again;
      run["verify_pass"] = ok;
      verified = verified && ok;
    }
    run_list.push_back(std::move(run));
  }
  Json report;
  if (runs.size() == 1) {
    report = run_list[0];
  } else {
    report["runs"] = run_list;
  }
  report["params"] = params;
  report["seed"] = a.opts.seed;
  write_text(render(report, c), c.out, out);
  return verified ? kOk : kValidationFailure;
}

struct BoundsArgs {
  double eps = 0.0, nu = 0.0, beta = 0.0, k = 0.0, m = 0.0, n = 0.0, d = 1.0, comm = 0.0, cc = 0.0;
};

int emit_bound(const BoundReport& r, const Common& c, std::ostream& out) {
  std::string text;
  if (c.format == "table") {
    text = to_table(r, c.precision);
  } else if (c.format == "csv") {
    text = to_csv(r, c.precision);
  } else {
    text = dump_canonical(round_json(to_json(r), c.precision));
  }
  write_text(text, c.out, out);
  return kOk;
}

struct NetArgs {
  std::size_t dim = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::size_t budget = 100000;
  std::size_t probes = 1000;
  std::size_t subspace_d = 0;
  bool points = false;
};

int cmd_net_test(const NetArgs& a, const Common& c, std::ostream& out) {
  const SphereNet net = sphere_net(a.dim, a.eps, RngSeed{a.seed, 0}, a.budget);
  const CoveringCheck chk = check_covering(net, a.probes, RngSeed{a.seed, 1});
  Json report{{"dim", a.dim},
              {"epsilon", a.eps},
              {"seed", a.seed},
              {"size", net.points.size()},
              {"bound", sphere_net_bound(a.dim, a.eps)},
              {"refined_bound", sphere_net_refined_bound(a.dim, a.eps)},
              {"within_bound", static_cast<double>(net.points.size()) <= sphere_net_bound(a.dim, a.eps)},
              {"probes", a.probes},
              {"max_gap", chk.max_gap},
              {"pass", chk.pass}};
  if (a.points) report["points"] = to_json(net)["points"];
  if (a.subspace_d > 0) {
    const SubspaceNet sub = subspace_net_build(a.dim, a.subspace_d, net);
    report["subspace"] = Json{{"d", a.subspace_d}, {"members", sub.members.size()}, {"bound", subspace_net_bound(a.dim, a.subspace_d, a.eps)}};
  }
  write_text(render(report, c), c.out, out);
  return chk.pass ? kOk : kValidationFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Common common;
  try {
    common.threads = default_threads();
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kInvalidInput;
  }

  CLI::App app{"One-shot visible compression experiments", "oneshot_qcomp"};
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-ensemble", "generate a random block ensemble file");
  gen_cmd->add_option("--m", gen.params.m, "dimension")->required();
  gen_cmd->add_option("--k", gen.params.k, "blocks per basis (must divide m)")->required();
  gen_cmd->add_option("--groups", gen.params.groups, "number of bases")->required();
  gen_cmd->add_option("--seed", gen.params.seed)->capture_default_str();
  gen_cmd->add_option("--out", gen.file, "ensemble file; the summary goes to stdout")->required();
  gen_cmd->add_option("--encoding", gen.encoding)->check(CLI::IsMember({"json", "binary"}))->capture_default_str();
  add_common(gen_cmd, common, false, false);

  EntropyArgs ent;
  auto* ent_cmd = app.add_subcommand("entropies", "entropy and information quantities of an ensemble");
  ent_cmd->add_option("--ensemble", ent.ensemble)->required();
  ent_cmd->add_option("--cert", ent.cert, "write the max-information certificate here");
  ent_cmd->add_option("--tol", ent.tol, "duality gap tolerance in bits")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(ent_cmd, common);

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand("verify-cert", "check a max-information certificate against an ensemble");
  ver_cmd->add_option("--ensemble", ver.ensemble)->required();
  ver_cmd->add_option("--cert", ver.cert)->required();
  ver_cmd->add_option("--tol", ver.tol, "largest accepted gap in bits")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(ver_cmd, common);

  ConcArgs conc;
  conc.params.trials = 0;
  auto* conc_cmd = app.add_subcommand("conc-test", "Monte Carlo tail of random projections restricted to a subspace");
  conc_cmd->add_option("--m", conc.params.m)->required();
  conc_cmd->add_option("--p", conc.params.p)->capture_default_str();
  conc_cmd->add_option("--d", conc.params.d)->capture_default_str();
  conc_cmd->add_option("--l", conc.params.l)->required();
  conc_cmd->add_option("--alpha", conc.params.alpha)->capture_default_str();
  conc_cmd->add_option("--trials", conc.params.trials)->required();
  conc_cmd->add_option("--seed", conc.params.seed)->capture_default_str();
  conc_cmd->add_option("--pairs", conc.pairs, "Lipschitz probe pairs (0 skips the probe)")->capture_default_str();
  conc_cmd->add_option("--csv", conc.csv, "per-trial CSV path");
  add_common(conc_cmd, common);

  AttackArgs att;
  auto* att_cmd = app.add_subcommand("attack", "see-saw search for low-error protocols");
  att_cmd->add_option("--ensemble", att.ensemble)->required();
  att_cmd->add_option("--d", att.dims, "message dimension(s), ascending")->required()->delimiter(',');
  att_cmd->add_option("--restarts", att.opts.restarts)->capture_default_str();
  att_cmd->add_option("--max-iters", att.opts.max_iters)->check(CLI::PositiveNumber)->capture_default_str();
  att_cmd->add_option("--tol", att.opts.tol)->check(CLI::NonNegativeNumber)->capture_default_str();
  att_cmd->add_option("--seed", att.opts.seed)->capture_default_str();
  att_cmd->add_option("--first-order-iters", att.opts.first_order_iters)->check(CLI::PositiveNumber)->capture_default_str();
  att_cmd->add_flag("--pure-messages", att.opts.pure_messages, "restrict messages to pure states");
  att_cmd->add_flag("--verify", att.verify, "recompute each error from the serialized protocol");
  add_common(att_cmd, common);

  BoundsArgs bnd;
  auto* bnd_cmd = app.add_subcommand("bounds", "closed-form bounds and their side conditions");
  bnd_cmd->require_subcommand(1);
  auto* cor5_cmd = bnd_cmd->add_subcommand("cor5", "communication lower bound with explicit constants");
  cor5_cmd->add_option("--eps", bnd.eps)->required();
  cor5_cmd->add_option("--k", bnd.k)->required();
  cor5_cmd->add_option("--m", bnd.m)->required();
  cor5_cmd->add_option("--n", bnd.n)->required();
  auto* thm3_cmd = bnd_cmd->add_subcommand("thm3", "side conditions of the entanglement-assisted lower bound");
  thm3_cmd->add_option("--eps", bnd.eps)->required();
  thm3_cmd->add_option("--nu", bnd.nu)->required();
  thm3_cmd->add_option("--beta", bnd.beta)->required();
  thm3_cmd->add_option("--k", bnd.k)->required();
  thm3_cmd->add_option("--m", bnd.m)->required();
  thm3_cmd->add_option("--n", bnd.n)->required();
  thm3_cmd->add_option("--d", bnd.d)->required();
  auto* thm1_cmd = bnd_cmd->add_subcommand("thm1", "separation summary");
  thm1_cmd->add_option("--eps", bnd.eps)->required();
  thm1_cmd->add_option("--k", bnd.k)->required();
  thm1_cmd->add_option("--m", bnd.m)->required();
  auto* const_cmd = bnd_cmd->add_subcommand("constants", "explicit proof constants");
  auto* prop6_cmd = bnd_cmd->add_subcommand("prop6", "upper bound on information cost; the O(1) constant is an input");
  prop6_cmd->add_option("--eps", bnd.eps)->required();
  prop6_cmd->add_option("--k", bnd.k)->required();
  prop6_cmd->add_option("--cc", bnd.cc, "constant multiplying log log(1/eps)")->required();
  auto* entlb_cmd = bnd_cmd->add_subcommand("ent-lb", "entanglement needed given a communication budget");
  entlb_cmd->add_option("--eps", bnd.eps)->required();
  entlb_cmd->add_option("--m", bnd.m)->required();
  entlb_cmd->add_option("--comm", bnd.comm, "communication in bits")->required();
  for (auto* sub : {cor5_cmd, thm3_cmd, thm1_cmd, const_cmd, prop6_cmd, entlb_cmd}) add_common(sub, common, true);

  NetArgs net;
  auto* net_cmd = app.add_subcommand("net-test", "greedy sphere net with a covering check");
  net_cmd->add_option("--dim", net.dim)->required();
  net_cmd->add_option("--eps", net.eps)->required();
  net_cmd->add_option("--seed", net.seed)->capture_default_str();
  net_cmd->add_option("--budget", net.budget, "largest admissible net size")->capture_default_str();
  net_cmd->add_option("--probes", net.probes)->check(CLI::PositiveNumber)->capture_default_str();
  net_cmd->add_option("--subspace-d", net.subspace_d, "also build the subspace net of this dimension")->capture_default_str();
  net_cmd->add_flag("--points", net.points, "include the net points in the report");
  add_common(net_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*gen_cmd) return cmd_gen_ensemble(gen, common, out);
    if (*ent_cmd) return cmd_entropies(ent, common, out, err);
    if (*ver_cmd) return cmd_verify_cert(ver, common, out);
    if (*conc_cmd) return cmd_conc_test(conc, common, out);
    if (*att_cmd) return cmd_attack(att, common, out);
    if (*net_cmd) return cmd_net_test(net, common, out);
    if (*cor5_cmd) return emit_bound(cor5_report(bnd.eps, bnd.k, bnd.m, bnd.n), common, out);
    if (*thm3_cmd) return emit_bound(thm3_check(Thm3Params{bnd.eps, bnd.nu, bnd.beta, bnd.k, bnd.m, bnd.n, bnd.d}), common, out);
    if (*thm1_cmd) return emit_bound(thm1_summary(bnd.k, bnd.m, bnd.eps), common, out);
    if (*const_cmd) return emit_bound(constants_report(), common, out);
    if (*entlb_cmd) return emit_bound(ent_lb_given_comm(bnd.eps, bnd.m, bnd.comm), common, out);
    if (*prop6_cmd) {
      if (!(bnd.cc >= 0.0)) throw Error(ErrorKind::invalid_parameter, "cc must be nonnegative");
      BoundReport r;
      r.name = "prop6";
      r.bound_bits = prop6_cost(bnd.k, bnd.eps, bnd.cc);
      r.values["cc"] = bnd.cc;
      r.values["half_log2_k"] = 0.5 * std::log2(bnd.k);
      return emit_bound(r, common, out);
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return kInvalidInput;
}

}  // namespace qcomp::cli
