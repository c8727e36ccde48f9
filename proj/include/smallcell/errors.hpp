#pragma once

#include <stdexcept>
#include <string>

namespace smallcell {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a documented precondition (non-positive density,
/// alpha <= 2, malformed pmf, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// The truncated load pmf leaves more than the allowed tail mass beyond k_max.
class TailMassTooLarge : public Error {
 public:
  using Error::Error;
};

/// Exact enumeration was requested for an assignment space that is too large.
class EnumerationTooLarge : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

/// An empirical cdf was requested from an empty sample set.
class EmptySamples : public Error {
 public:
  using Error::Error;
};

}  // namespace smallcell
