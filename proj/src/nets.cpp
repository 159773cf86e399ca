#include "qcomp/nets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace qcomp {

double sphere_net_bound(std::size_t dim, double epsilon) {
  return std::pow(4.0 / epsilon, 2.0 * static_cast<double>(dim));
}

double sphere_net_refined_bound(std::size_t dim, double epsilon) {
  return std::pow(1.0 + 2.0 / epsilon, 2.0 * static_cast<double>(dim));
}

namespace {

double nearest_distance(const std::vector<PureState>& points, const Vector& v, std::size_t* index = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dist = (points[i].amplitudes() - v).norm();
    if (dist < best) {
      best = dist;
      if (index) *index = i;
    }
  }
  return best;
}

}  // namespace

SphereNet sphere_net(std::size_t dim, double epsilon, RngSeed seed, std::size_t budget) {
  if (dim < 1) throw Error(ErrorKind::invalid_dimension, "sphere_net: dim must be positive");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw Error(ErrorKind::invalid_parameter, "sphere_net: epsilon must lie in (0, 1]");
  const double bound = sphere_net_bound(dim, epsilon);
  if (bound > static_cast<double>(budget)) {
    throw Error(ErrorKind::infeasible_scale, "sphere_net: size bound " + std::to_string(bound) + " exceeds budget " + std::to_string(budget));
  }
  constexpr std::size_t patience = 1000;
  const double separation = 0.75 * epsilon;
  SphereNet net{dim, epsilon, {}};
  Rng rng(seed);
  std::size_t rejected = 0;
  while (net.points.size() < budget && rejected < patience) {
    Vector v = random_unit_vector(dim, rng);
    if (nearest_distance(net.points, v) > separation) {
      net.points.push_back(PureState::from_amplitudes(v));
      rejected = 0;
    } else {
      ++rejected;
    }
  }
  return net;
}

CoveringCheck check_covering(const SphereNet& net, std::size_t probes, RngSeed seed) {
  CoveringCheck c;
  if (net.points.empty()) {
    c.max_gap = std::numeric_limits<double>::infinity();
    return c;
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < probes; ++i) {
    c.max_gap = std::max(c.max_gap, nearest_distance(net.points, random_unit_vector(net.dim, rng)));
  }
  c.pass = probes > 0 && c.max_gap <= net.epsilon;
  return c;
}

Json to_json(const SphereNet& net) {
  Json pts = Json::array();
  for (const auto& p : net.points) pts.push_back(matrix_to_json(Matrix(p.amplitudes())));
  return Json{{"dim", net.dim}, {"epsilon", net.epsilon}, {"size", net.points.size()}, {"points", pts}};
}

double seminorm(const Matrix& m, const Subspace& a) {
  if (m.rows() != m.cols() || m.rows() != static_cast<Index>(a.ambient_dim())) {
    throw Error(ErrorKind::invalid_input, "seminorm: operator and subspace dimensions differ");
  }
  if (a.dim() == 0) return 0.0;
  const auto eig = hermitian_eig(hermitian_part(a.frame().adjoint() * m * a.frame()));
  return std::max(std::abs(eig.values(0)), std::abs(eig.values(eig.values.size() - 1)));
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

SubspaceNet subspace_net_build(std::size_t q, std::size_t d, const SphereNet& base) {
  if (base.dim != q) throw Error(ErrorKind::invalid_input, "subspace_net_build: base net lives in another dimension");
  if (d < 1 || d > q) throw Error(ErrorKind::invalid_parameter, "subspace_net_build: need 1 <= d <= q");
  const std::size_t np = base.points.size();
  double total = 0.0;
  for (std::size_t j = 1; j <= std::min(d, np); ++j) total += binomial(np, j);
  if (total > static_cast<double>(kSubspaceNetCap)) {
    throw Error(ErrorKind::infeasible_scale, "subspace_net_build: " + std::to_string(total) + " members exceed the cap");
  }
  SubspaceNet net;
  net.q = q;
  net.d = d;
  net.base = base;
  const auto qq = static_cast<Index>(q);
  for (std::size_t j = 1; j <= std::min(d, np); ++j) {
    std::vector<std::size_t> idx(j);
    for (std::size_t i = 0; i < j; ++i) idx[i] = i;
    while (true) {
      Matrix vecs(qq, static_cast<Index>(j));
      for (std::size_t c = 0; c < j; ++c) vecs.col(static_cast<Index>(c)) = base.points[idx[c]].amplitudes();
      net.members.push_back(Subspace::span(vecs));
      net.member_points.push_back(idx);
      // next combination
      std::size_t pos = j;
      while (pos > 0 && idx[pos - 1] == np - j + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t c = pos; c < j; ++c) idx[c] = idx[c - 1] + 1;
    }
  }
  return net;
}

double subspace_net_bound(std::size_t q, std::size_t d, double delta) {
  return std::pow(8.0 * std::sqrt(static_cast<double>(d)) / delta, 2.0 * static_cast<double>(q * d));
}

std::size_t snap_to_net(const SubspaceNet& net, const Subspace& a) {
  if (a.ambient_dim() != net.q) throw Error(ErrorKind::invalid_input, "snap_to_net: subspace dimension mismatch");
  if (a.dim() == 0 || a.dim() > net.d) throw Error(ErrorKind::invalid_input, "snap_to_net: subspace dimension outside [1, d]");
  if (net.base.points.empty()) throw Error(ErrorKind::invalid_input, "snap_to_net: empty base net");
  std::vector<std::size_t> chosen;
  for (std::size_t c = 0; c < a.dim(); ++c) {
    std::size_t idx = 0;
    nearest_distance(net.base.points, a.frame().col(static_cast<Index>(c)), &idx);
    chosen.push_back(idx);
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  // Members are stored by size, then lexicographically; find by search.
  for (std::size_t i = 0; i < net.member_points.size(); ++i) {
    if (net.member_points[i] == chosen) return i;
  }
  throw Error(ErrorKind::invalid_input, "snap_to_net: snapped point set is not a member");
}

}  // namespace qcomp
