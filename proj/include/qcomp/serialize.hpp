#pragma once

// Matrix wire formats.
//   JSON:   {"cols": c, "im": [...], "re": [...], "rows": r}, row-major.
//   binary: uint64 rows, uint64 cols, then rows*cols pairs of float64 (re, im),
//           everything little-endian.

#include <cstdint>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qcomp/qcore.hpp"

namespace qcomp {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
/// Throws parse-error naming `where` on malformed input.
Matrix matrix_from_json(const Json& j, const std::string& where = "matrix");

void write_u64(std::ostream& os, std::uint64_t v);
void write_f64(std::ostream& os, double v);
std::uint64_t read_u64(std::istream& is, const std::string& where);
double read_f64(std::istream& is, const std::string& where);

void write_matrix_binary(std::ostream& os, const Matrix& m);
Matrix read_matrix_binary(std::istream& is, const std::string& where = "matrix");

/// Round to `digits` significant decimal digits (for report output only).
double round_sig(double x, int digits);

/// JSON text with sorted keys and a trailing newline.
std::string dump_canonical(const Json& j);

}  // namespace qcomp
