#pragma once

#include <stdexcept>
#include <string>

namespace parrep {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A serial or parallel evolution ran past its step/time cap without the
/// awaited event (usually an escape). Often means the region is absorbing.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class DephasingFailed : public Error {
 public:
  using Error::Error;
};

class AllCopiesEscaped : public Error {
 public:
  using Error::Error;
};

/// The ordering plan ran out of fragments before any of them escaped.
class SourceExhausted : public Error {
 public:
  using Error::Error;
};

class MonotonicityViolation : public Error {
 public:
  using Error::Error;
};

/// The thinning bound was smaller than the true jump rate somewhere on a flow.
class BoundViolated : public Error {
 public:
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace parrep
