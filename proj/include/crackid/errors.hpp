#pragma once

#include <stdexcept>
#include <string>

namespace crackid {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInterface : public Error {
 public:
  using Error::Error;
};

/// The breaking line comes closer than the mesh margin to y = 0 or y = 0.5.
class InterfaceTooClose : public Error {
 public:
  using Error::Error;
};

class DegenerateElement : public Error {
 public:
  using Error::Error;
};

class InvalidPoisson : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class MaxIterations : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class LineSearchFailed : public Error {
 public:
  using Error::Error;
};

class MissingAdjacentTriangle : public Error {
 public:
  using Error::Error;
};

/// A sampled law value broke one of its analytic bounds at `s`.
class BoundViolated : public Error {
 public:
  BoundViolated(const std::string& what, double s) : Error(what), s_(s) {}
  double s() const { return s_; }

 private:
  double s_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace crackid
