#pragma once

#include <stdexcept>
#include <string>

namespace narrowflux {

// Broad classes map onto CLI exit codes (1, 2, 3).
enum class ErrorClass { config = 1, convergence = 2, io = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

#define NARROWFLUX_ERROR(Name, Class)                                          \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& what) : Error(ErrorClass::Class, what) {} \
  };

// Problem-instance and argument errors.
NARROWFLUX_ERROR(DomainError, config)
NARROWFLUX_ERROR(OverlapError, config)
NARROWFLUX_ERROR(RoleError, config)
NARROWFLUX_ERROR(DimensionMismatch, config)
NARROWFLUX_ERROR(InsufficientData, config)
NARROWFLUX_ERROR(ResolutionError, config)
NARROWFLUX_ERROR(ConfigError, config)
NARROWFLUX_ERROR(SingularityError, config)
NARROWFLUX_ERROR(DivisionByZero, config)

// Numerical failures.
NARROWFLUX_ERROR(NonConvergence, convergence)
NARROWFLUX_ERROR(SingularSystem, convergence)
NARROWFLUX_ERROR(StallError, convergence)
NARROWFLUX_ERROR(MaxTimeExceeded, convergence)
NARROWFLUX_ERROR(Timeout, convergence)

NARROWFLUX_ERROR(IoError, io)

#undef NARROWFLUX_ERROR

}  // namespace narrowflux
