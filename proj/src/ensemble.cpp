#include "qcomp/ensemble.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qcomp {

void EnsembleParams::validate() const {
  if (m < 1 || k < 1 || groups < 1) throw Error(ErrorKind::invalid_parameter, "ensemble: m, k and groups must be positive");
  if (m % k != 0) {
    throw Error(ErrorKind::invalid_parameter,
                "ensemble: k = " + std::to_string(k) + " does not divide m = " + std::to_string(m));
  }
}

JrsEnsemble::JrsEnsemble(EnsembleParams params, std::vector<Matrix> bases)
    : params_(params), bases_(std::move(bases)) {
  params_.validate();
  if (bases_.size() != params_.groups) {
    throw Error(ErrorKind::validation_error, "ensemble: expected " + std::to_string(params_.groups) + " bases");
  }
  const auto m = static_cast<Index>(params_.m);
  for (std::size_t i = 0; i < bases_.size(); ++i) {
    const auto& b = bases_[i];
    if (b.rows() != m || b.cols() != m) {
      throw Error(ErrorKind::validation_error, "ensemble: basis " + std::to_string(i) + " has wrong shape");
    }
    if (max_abs_diff(b.adjoint() * b, Matrix::Identity(m, m)) > 1e-10) {
      throw Error(ErrorKind::validation_error, "ensemble: basis " + std::to_string(i) + " is not unitary");
    }
  }
}

Matrix JrsEnsemble::block_projector(std::size_t i, std::size_t j) const {
  const auto bs = static_cast<Index>(params_.block());
  const auto cols = bases_.at(i).middleCols(static_cast<Index>(j) * bs, bs);
  return cols * cols.adjoint();
}

DensityOperator JrsEnsemble::state(std::size_t i, std::size_t j) const {
  const double scale = static_cast<double>(params_.k) / static_cast<double>(params_.m);
  return DensityOperator::from_matrix(hermitian_part(scale * block_projector(i, j)));
}

std::vector<DensityOperator> JrsEnsemble::states() const {
  std::vector<DensityOperator> out;
  out.reserve(size());
  for (std::size_t i = 0; i < params_.groups; ++i) {
    for (std::size_t j = 0; j < params_.k; ++j) out.push_back(state(i, j));
  }
  return out;
}

JrsEnsemble generate_jrs(const EnsembleParams& params) {
  params.validate();
  std::vector<Matrix> bases;
  bases.reserve(params.groups);
  for (std::size_t i = 0; i < params.groups; ++i) bases.push_back(haar_unitary(params.m, RngSeed{params.seed, i}));
  return JrsEnsemble(params, std::move(bases));
}

DensityOperator ensemble_average(const JrsEnsemble& e) {
  const auto m = static_cast<Index>(e.params().m);
  Matrix avg = Matrix::Zero(m, m);
  for (const auto& s : e.states()) avg += s.matrix();
  avg /= static_cast<double>(e.size());
  const Matrix target = Matrix::Identity(m, m) / static_cast<double>(m);
  if (max_abs_diff(avg, target) > 1e-10) throw Error(ErrorKind::validation_error, "ensemble average differs from 1/m");
  return DensityOperator::from_matrix(hermitian_part(avg));
}

CqState to_cq_state(const JrsEnsemble& e) { return CqState::uniform(e.states()); }

double qic_prepare_send(const CqState& tau) { return 0.5 * mutual_info_cq(tau); }
double qic_prepare_send(const JrsEnsemble& e) { return qic_prepare_send(to_cq_state(e)); }

ImaxCertificate jrs_analytic_certificate(const JrsEnsemble& e) {
  const auto& p = e.params();
  const auto m = static_cast<Index>(p.m);
  const double k = static_cast<double>(p.k);
  ImaxCertificate c;
  c.primal_sigma = (k / static_cast<double>(p.m)) * Matrix::Identity(m, m);
  for (std::size_t i = 0; i < p.groups; ++i) {
    for (std::size_t j = 0; j < p.k; ++j) c.dual_ops.push_back((k / static_cast<double>(p.n())) * e.block_projector(i, j));
  }
  c.value = std::log2(k);
  c.gap = 0.0;
  return c;
}

// ---------------------------------------------------------------------------
// Serialization

Json to_json(const JrsEnsemble& e) {
  Json bases = Json::array();
  for (const auto& b : e.bases()) bases.push_back(matrix_to_json(b));
  const auto& p = e.params();
  return Json{{"m", p.m}, {"k", p.k}, {"groups", p.groups}, {"seed", p.seed}, {"bases", bases}};
}

JrsEnsemble ensemble_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::parse_error, "ensemble: expected a JSON object");
  EnsembleParams p;
  auto count = [&](const char* key) -> std::uint64_t {
    if (!j.contains(key) || !j.at(key).is_number_unsigned()) {
      throw Error(ErrorKind::parse_error, std::string("ensemble: field '") + key + "' missing or not an unsigned integer");
    }
    return j.at(key).get<std::uint64_t>();
  };
  p.m = count("m");
  p.k = count("k");
  p.groups = count("groups");
  p.seed = count("seed");
  if (!j.contains("bases") || !j.at("bases").is_array()) throw Error(ErrorKind::parse_error, "ensemble: 'bases' must be an array");
  std::vector<Matrix> bases;
  const auto& arr = j.at("bases");
  for (std::size_t i = 0; i < arr.size(); ++i) bases.push_back(matrix_from_json(arr[i], "bases[" + std::to_string(i) + "]"));
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::validation_error, e.what());
  }
  return JrsEnsemble(p, std::move(bases));
}

void save(const JrsEnsemble& e, const std::filesystem::path& path, EnsembleFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::invalid_input, "cannot open " + path.string() + " for writing");
  if (format == EnsembleFormat::json) {
    os << dump_canonical(to_json(e));
  } else {
    const auto& p = e.params();
    write_u64(os, p.m);
    write_u64(os, p.k);
    write_u64(os, p.groups);
    write_u64(os, p.seed);
    for (const auto& b : e.bases()) write_matrix_binary(os, b);
  }
  if (!os) throw Error(ErrorKind::invalid_input, "write failed: " + path.string());
}

JrsEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::invalid_input, "cannot open " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string data = buf.str();
  const auto first = data.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && data[first] == '{') {
    Json j;
    try {
      j = Json::parse(data);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::parse_error, path.string() + ": byte " + std::to_string(e.byte) + ": malformed JSON");
    }
    return ensemble_from_json(j);
  }
  std::istringstream bin(data);
  const std::string where = path.string();
  EnsembleParams p;
  p.m = read_u64(bin, where + " header");
  p.k = read_u64(bin, where + " header");
  p.groups = read_u64(bin, where + " header");
  p.seed = read_u64(bin, where + " header");
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::validation_error, e.what());
  }
  if (p.groups > (1u << 20) || p.m > (1u << 12)) throw Error(ErrorKind::parse_error, where + ": header sizes implausible");
  std::vector<Matrix> bases;
  for (std::size_t i = 0; i < p.groups; ++i) bases.push_back(read_matrix_binary(bin, where + " basis " + std::to_string(i)));
  return JrsEnsemble(p, std::move(bases));
}

}  // namespace qcomp
