#pragma once

#include <stdexcept>
#include <string>

namespace gaussfisher {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Matrix or vector shapes that do not agree with the declared mode count.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A parameter or state lies outside the domain an operation accepts.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A numerical precondition failed. `flag()` names the violated condition
/// (e.g. "is_isothermal", "nu_min", "cutoff") so front ends can report it.
class PreconditionError : public Error {
  public:
    PreconditionError(std::string flag, const std::string &what)
        : Error(what), flag_(std::move(flag)) {}

    [[nodiscard]] const std::string &flag() const noexcept { return flag_; }

  private:
    std::string flag_;
};

/// An iterative procedure did not reach its tolerance.
class ConvergenceError : public Error {
  public:
    using Error::Error;
};

/// Malformed model-config document.
class ConfigError : public Error {
  public:
    using Error::Error;
};

} // namespace gaussfisher
