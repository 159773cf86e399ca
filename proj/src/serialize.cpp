#include "qcomp/serialize.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

namespace qcomp {

Json matrix_to_json(const Matrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
  auto fail = [&](const std::string& why) { throw Error(ErrorKind::parse_error, where + ": " + why); };
  if (!j.is_object()) fail("expected an object");
  for (const char* key : {"rows", "cols", "re", "im"}) {
    if (!j.contains(key)) fail(std::string("missing key '") + key + "'");
  }
  if (!j["rows"].is_number_unsigned() || !j["cols"].is_number_unsigned()) fail("rows/cols must be unsigned integers");
  const auto rows = j["rows"].get<std::uint64_t>();
  const auto cols = j["cols"].get<std::uint64_t>();
  const Json& re = j["re"];
  const Json& im = j["im"];
  if (!re.is_array() || !im.is_array()) fail("re/im must be arrays");
  if (re.size() != rows * cols || im.size() != rows * cols) fail("entry count does not match rows*cols");
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::size_t k = 0;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c, ++k) {
      if (!re[k].is_number() || !im[k].is_number()) fail("non-numeric entry at index " + std::to_string(k));
      m(r, c) = Complex(re[k].get<double>(), im[k].get<double>());
    }
  }
  if (!m.allFinite()) fail("non-finite entry");
  return m;
}

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

void write_f64(std::ostream& os, double v) { write_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t read_u64(std::istream& is, const std::string& where) {
  const auto offset = static_cast<long long>(is.tellg());
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) {
    throw Error(ErrorKind::parse_error, where + ": truncated input at byte offset " + std::to_string(offset));
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& is, const std::string& where) { return std::bit_cast<double>(read_u64(is, where)); }

void write_matrix_binary(std::ostream& os, const Matrix& m) {
  write_u64(os, static_cast<std::uint64_t>(m.rows()));
  write_u64(os, static_cast<std::uint64_t>(m.cols()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      write_f64(os, m(r, c).real());
      write_f64(os, m(r, c).imag());
    }
  }
}

Matrix read_matrix_binary(std::istream& is, const std::string& where) {
  const auto rows = read_u64(is, where);
  const auto cols = read_u64(is, where);
  if (rows > (1u << 16) || cols > (1u << 16)) {
    throw Error(ErrorKind::parse_error, where + ": implausible matrix dimensions");
  }
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      const double re = read_f64(is, where);
      const double im = read_f64(is, where);
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

double round_sig(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
  return std::strtod(buf, nullptr);
}

std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace qcomp
