#pragma once

#include <stdexcept>
#include <string>

namespace entsim {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input outside a declared validity range (wavelength, temperature, ...).
class RangeError : public Error {
  public:
    using Error::Error;
};

/// Mathematically invalid argument (e.g. signal wavelength below pump).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Malformed data file or scenario document.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Registry or fixture key that does not resolve.
class LookupError : public Error {
  public:
    using Error::Error;
};

/// Root finder or linear solver failed to produce a solution.
class SolverError : public Error {
  public:
    using Error::Error;
};

/// Quadrature or eigensolver did not reach the requested accuracy.
class NumericalError : public Error {
  public:
    explicit NumericalError(const std::string& what, double error_estimate = 0.0)
        : Error(what), error_estimate_(error_estimate) {}
    double error_estimate() const { return error_estimate_; }

  private:
    double error_estimate_;
};

/// Object-level invariant violated (density matrix, config, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

}  // namespace entsim
