#pragma once

#include <stdexcept>
#include <string>

namespace klp {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unsupported family/rank or an invalid generator subset / filtration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller-side precondition was violated (e.g. sigma not below omega).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Operation not available for this Coxeter family (e.g. S_n-only combinatorics).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Text that cannot be parsed as an element, generator set or polynomial.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input polynomial outside the domain of an operation (odd v-exponent for the
/// q-view, non-symmetric argument to the peel, inexact division).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two computation routes disagreed, or an internal invariant failed. Always a bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace klp
