#pragma once

#include <stdexcept>
#include <string>

namespace sdegp {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input matrix is not symmetric within tolerance.
class NotSymmetricError : public Error {
public:
  using Error::Error;
};

/// Cholesky factorization failed for every jitter level tried.
class FactorizationError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class EmptyInputError : public Error {
public:
  using Error::Error;
};

class TooFewPointsError : public Error {
public:
  using Error::Error;
};

/// Kernel or hyper parameters violate their positivity constraints.
class InvalidParamsError : public Error {
public:
  using Error::Error;
};

/// Parameter vector lies outside the declared search bounds.
class OutOfBoundsError : public Error {
public:
  using Error::Error;
};

/// Subsampling factor does not leave at least two samples.
class FactorTooLargeError : public Error {
public:
  using Error::Error;
};

class TooShortError : public Error {
public:
  using Error::Error;
};

/// A simulated state became NaN or infinite.
class NonFiniteStateError : public Error {
public:
  NonFiniteStateError(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const { return step_; }

private:
  int step_ = -1;
};

/// The optimization objective became NaN or infinite at the current iterate.
class NonFiniteLossError : public Error {
public:
  NonFiniteLossError(const std::string& what, int iteration) : Error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

private:
  int iteration_ = -1;
};

class BudgetTooSmallError : public Error {
public:
  using Error::Error;
};

class ZeroTruthNormError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace sdegp
