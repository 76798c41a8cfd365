#pragma once

#include <stdexcept>
#include <string>

namespace grwalk {

/// Coarse failure category; the CLI maps it onto its exit code.
enum class ErrorKind { config, data, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define GRWALK_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

// d_out fell below the positivity floor somewhere on the grid.
GRWALK_DEFINE_ERROR(DegeneracyError, data)
GRWALK_DEFINE_ERROR(SymmetryError, config)
GRWALK_DEFINE_ERROR(ConfigError, config)
GRWALK_DEFINE_ERROR(DomainError, data)
GRWALK_DEFINE_ERROR(ParseError, data)
GRWALK_DEFINE_ERROR(SingularMatrixError, numeric)
GRWALK_DEFINE_ERROR(ConvergenceError, numeric)
GRWALK_DEFINE_ERROR(RankError, numeric)
GRWALK_DEFINE_ERROR(EmptyClusterError, numeric)

#undef GRWALK_DEFINE_ERROR

}  // namespace grwalk
