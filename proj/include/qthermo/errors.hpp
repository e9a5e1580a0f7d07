#pragma once

#include <stdexcept>
#include <string>

namespace qthermo {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (T <= 0, negative rate, ...).
class DomainError : public Error {
   public:
    using Error::Error;
};

/// Charge-basis truncation too small for the requested eigenstates.
class TruncationError : public Error {
   public:
    using Error::Error;
};

/// Requested Hilbert-space dimension exceeds the configured maximum.
class ResourceError : public Error {
   public:
    using Error::Error;
};

class DimensionError : public Error {
   public:
    using Error::Error;
};

/// Time integration failed to converge (step size underflow, step budget exhausted).
class IntegrationError : public Error {
   public:
    using Error::Error;
};

/// Steady state is not unique (null space of the generator has dimension != 1).
class AmbiguityError : public Error {
   public:
    using Error::Error;
};

class SolveError : public Error {
   public:
    using Error::Error;
};

class CalibrationError : public Error {
   public:
    using Error::Error;
};

/// Degenerate populations or responses (vanishing denominators, collinear basis).
class DegenerateError : public Error {
   public:
    using Error::Error;
};

class FitError : public Error {
   public:
    using Error::Error;
};

/// Slope outside the range a coefficient can reach for the given frequencies.
class OutOfRangeError : public Error {
   public:
    OutOfRangeError(const std::string &what, double lo, double hi) : Error(what), low(lo), high(hi) {}
    double low;
    double high;
};

class GridMismatchError : public Error {
   public:
    using Error::Error;
};

class ConfigError : public Error {
   public:
    using Error::Error;
};

}  // namespace qthermo
