#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcomp {

enum class ErrorKind {
  invalid_dimension,
  invalid_shape,
  invalid_input,
  invalid_parameter,
  convergence_failure,
  infeasible_scale,
  parse_error,
  validation_error,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so that
// callers (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::invalid_shape: return "invalid-shape";
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::convergence_failure: return "convergence-failure";
    case ErrorKind::infeasible_scale: return "infeasible-scale";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::validation_error: return "validation-error";
  }
  return "unknown";
}

}  // namespace qcomp
