#pragma once

#include <stdexcept>
#include <string>

namespace robust_shannon {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument (sign, range, finiteness) was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The ball center (or noise covariance) stays singular after jitter.
class SingularCenter : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Gaussian mutual information is infinite: the signal has energy on the
/// null space of the noise covariance.
class DegenerateMI : public DomainError {
 public:
  using DomainError::DomainError;
};

class WaterfillNoConverge : public Error {
 public:
  using Error::Error;
};

class TooLargeForExact : public DomainError {
 public:
  using DomainError::DomainError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace robust_shannon
